#include "psta/syntax.hpp"

#include <cctype>
#include <map>
#include <set>

namespace psta {

namespace {

enum class Tok { Ident, Num, Sym, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t line, col;
};

// unicode spellings accepted alongside the ASCII ones
const std::pair<const char*, const char*> kUnicode[] = {
    {"λ", "\\"}, {"⊸", "-o"}, {"∀", "forall"}, {"⊗", "*"}, {"⟨", "<"}, {"⟩", ">"}, {"𝟏", "1"}, {"𝐁", "B"},
    {"𝐍", "N"},  {"𝐒", "S"},
};

std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> out;
    std::size_t i = 0, line = 1, col = 1;
    auto adv = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) {
                ++col;
            }
            ++i;
        }
    };
    while (i < s.size()) {
        unsigned char c = s[i];
        if (std::isspace(c)) {
            adv(1);
            continue;
        }
        if (c == '#') { // comment to end of line
            while (i < s.size() && s[i] != '\n') adv(1);
            continue;
        }
        std::size_t l0 = line, c0 = col;
        bool matched = false;
        for (const auto& [u, a] : kUnicode) {
            std::string us(u);
            if (s.compare(i, us.size(), us) == 0) {
                std::string as(a);
                Tok k = std::isalpha(static_cast<unsigned char>(as[0])) ? Tok::Ident : (as == "1" ? Tok::Num : Tok::Sym);
                out.push_back({k, as, l0, c0});
                adv(us.size());
                matched = true;
                break;
            }
        }
        if (matched) continue;
        if (std::isalpha(c) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '\'')) ++j;
            out.push_back({Tok::Ident, s.substr(i, j - i), l0, c0});
            adv(j - i);
            continue;
        }
        if (std::isdigit(c)) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            out.push_back({Tok::Num, s.substr(i, j - i), l0, c0});
            adv(j - i);
            continue;
        }
        if (s.compare(i, 2, "-o") == 0) {
            out.push_back({Tok::Sym, "-o", l0, c0});
            adv(2);
            continue;
        }
        if (std::string("\\.!()<>,*:^{}&").find(static_cast<char>(c)) != std::string::npos) {
            out.push_back({Tok::Sym, std::string(1, static_cast<char>(c)), l0, c0});
            adv(1);
            continue;
        }
        throw ParseError(l0, c0, std::string("unexpected character '") + static_cast<char>(c) + "'");
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

const std::set<std::string> kKeywords = {"let", "be", "in", "if", "then", "else", "as", "I", "copy", "proj", "d", "forall"};

struct Parser {
    std::vector<Token> toks;
    std::size_t pos = 0;
    std::vector<std::pair<std::string, std::string>> scope; // source name -> unique name
    std::map<std::string, std::pair<std::size_t, std::size_t>> binder_at;

    const Token& peek(std::size_t k = 0) const { return toks[std::min(pos + k, toks.size() - 1)]; }
    bool is(const std::string& s, std::size_t k = 0) const {
        const auto& t = peek(k);
        return t.kind != Tok::End && t.text == s;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        const auto& t = peek();
        throw ParseError(t.line, t.col, msg + (t.kind == Tok::End ? " at end of input" : " near '" + t.text + "'"));
    }
    void expect(const std::string& s) {
        if (!is(s)) fail("expected '" + s + "'");
        ++pos;
    }
    std::string ident() {
        const auto& t = peek();
        if (t.kind != Tok::Ident || kKeywords.count(t.text)) fail("expected an identifier");
        ++pos;
        return t.text;
    }

    std::string bind(const std::string& x, const Token& at) {
        auto u = fresh_name(x);
        binder_at[u] = {at.line, at.col};
        scope.emplace_back(x, u);
        return u;
    }
    void unbind(std::size_t n) { scope.resize(scope.size() - n); }

    // ---- types ----
    Type type() {
        if (is("forall")) {
            ++pos;
            std::vector<std::string> as;
            while (peek().kind == Tok::Ident && !is(".")) as.push_back(ident());
            if (as.empty()) fail("expected a type variable");
            expect(".");
            Type body = type();
            for (auto it = as.rbegin(); it != as.rend(); ++it) body = forall(*it, body);
            return body;
        }
        Type a = with_type();
        if (is("-o")) {
            ++pos;
            return imp(a, type());
        }
        return a;
    }
    Type with_type() {
        Type a = tensor_type_();
        while (is("&")) {
            ++pos;
            a = with(a, tensor_type_());
        }
        return a;
    }
    Type tensor_type_() {
        std::vector<Type> parts{prefix_type()};
        while (is("*")) {
            ++pos;
            parts.push_back(prefix_type());
        }
        return parts.size() == 1 ? parts[0] : tensor_type(parts);
    }
    Type prefix_type() {
        if (is("!")) {
            ++pos;
            return tbang(prefix_type());
        }
        if (is("(")) {
            ++pos;
            Type t = type();
            expect(")");
            return t;
        }
        if (is("1") && peek().kind == Tok::Num) {
            ++pos;
            return unit_type();
        }
        if (peek().kind == Tok::Ident && !kKeywords.count(peek().text)) {
            std::string n = peek().text;
            ++pos;
            auto indexed = [&](char head) -> std::optional<std::size_t> {
                if (n.size() > 2 && n[0] == head && n[1] == '_' &&
                    n.find_first_not_of("0123456789", 2) == std::string::npos)
                    return std::stoul(n.substr(2));
                return std::nullopt;
            };
            if (n == "B") {
                if (is("^")) {
                    ++pos;
                    if (peek().kind != Tok::Num) fail("expected a number");
                    auto k = std::stoul(peek().text);
                    ++pos;
                    if (k == 0) return unit_type();
                    return bool_tuple_type(k);
                }
                return bool_type();
            }
            if (auto i = indexed('N')) return nat_type(*i);
            if (auto i = indexed('S')) return string_type(*i);
            return tvar(n);
        }
        fail("expected a type");
    }

    // ---- terms ----
    bool starts_atom() const {
        const auto& t = peek();
        if (t.kind == Tok::Ident) return !kKeywords.count(t.text) || t.text == "I" || t.text == "d" || t.text == "proj" || t.text == "copy";
        return is("!") || is("(") || is("<");
    }
    bool starts_binding_form() const { return is("\\") || is("let") || is("if"); }

    Sugared term() {
        if (is("\\")) return abstraction();
        if (is("let")) return let_form();
        if (is("if")) {
            ++pos;
            auto c = term();
            expect("then");
            auto m = term();
            expect("else");
            auto n = term();
            return sg::if_(c, m, n);
        }
        std::vector<Sugared> parts{application()};
        while (is("*")) {
            ++pos;
            parts.push_back(starts_binding_form() ? term() : application());
        }
        return parts.size() == 1 ? parts[0] : sg::tensor(parts);
    }

    Sugared abstraction() {
        expect("\\");
        struct B {
            bool banged;
            std::string unique;
        };
        std::vector<B> bs;
        while (!is(".")) {
            bool banged = false;
            if (is("!")) {
                banged = true;
                ++pos;
            }
            const Token at = peek();
            auto x = ident();
            bs.push_back({banged, bind(x, at)});
        }
        if (bs.empty()) fail("expected a binder");
        expect(".");
        auto body = term();
        unbind(bs.size());
        for (auto it = bs.rbegin(); it != bs.rend(); ++it)
            body = it->banged ? sg::bang_lam(it->unique, body) : sg::lam(it->unique, body);
        return body;
    }

    Sugared let_form() {
        expect("let");
        auto scrut = term();
        expect("be");
        if (is("I")) {
            ++pos;
            expect("in");
            return sg::let_unit(scrut, term());
        }
        std::vector<std::string> binders;
        do {
            if (!binders.empty()) ++pos;
            bool banged = false;
            if (is("!")) {
                banged = true;
                ++pos;
            }
            const Token at = peek();
            auto x = ident();
            binders.push_back((banged ? "!" : "") + bind(x, at));
        } while (is("*"));
        if (binders.size() < 2) fail("a tensor pattern needs at least two binders");
        expect("in");
        auto body = term();
        unbind(binders.size());
        return sg::let_tensor(scrut, binders, body);
    }

    Sugared application() {
        if (!starts_atom()) fail("expected a term");
        Sugared f = atom();
        while (true) {
            if (starts_atom()) f = sg::app(f, atom());
            else if (starts_binding_form()) return sg::app(f, term());
            else return f;
        }
    }

    Sugared atom() {
        if (is("!")) {
            ++pos;
            return sg::bang(atom());
        }
        if (is("(")) {
            ++pos;
            auto t = term();
            if (is(":")) {
                ++pos;
                auto ty = type();
                expect(")");
                return sg::annot(t, ty);
            }
            expect(")");
            return t;
        }
        if (is("<")) {
            ++pos;
            auto l = term();
            expect(",");
            auto r = term();
            expect(">");
            return sg::pair(l, r);
        }
        if (is("I")) {
            ++pos;
            return sg::unit();
        }
        if (is("d") && is("(", 1)) {
            pos += 2;
            auto t = term();
            expect(")");
            return sg::der(t);
        }
        if (is("proj") && is("(", 1)) {
            pos += 2;
            auto t = term();
            expect(")");
            return sg::proj(t);
        }
        if (is("copy")) {
            ++pos;
            expect("^");
            expect("{");
            auto v = term();
            expect("}");
            if (!starts_atom()) fail("expected the copy scrutinee");
            auto n = atom();
            expect("as");
            const Token a1 = peek();
            auto x1 = ident();
            expect(",");
            const Token a2 = peek();
            auto x2 = ident();
            expect("in");
            expect("<");
            auto u1 = bind(x1, a1);
            auto p = term();
            unbind(1);
            expect(",");
            auto u2 = bind(x2, a2);
            auto q = term();
            unbind(1);
            expect(">");
            return sg::copy(v, n, u1, u2, p, q);
        }
        auto x = ident();
        for (auto it = scope.rbegin(); it != scope.rend(); ++it)
            if (it->first == x) return sg::var(it->second);
        return sg::var(x);
    }
};

// ---- printing ----

bool is_plain_ident(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'')) return false;
    return !kKeywords.count(s);
}

struct TermPrinter {
    bool uni;
    std::set<std::string> free;
    std::vector<std::pair<std::string, std::string>> scope; // original -> shown

    std::string bind(const std::string& orig) {
        std::string base = base_name(orig);
        if (!is_plain_ident(base)) base = "x";
        auto taken = [&](const std::string& c) {
            if (free.count(c) || kKeywords.count(c)) return true;
            for (const auto& [o, s] : scope)
                if (s == c) return true;
            return false;
        };
        std::string c = base;
        for (int i = 1; taken(c); ++i) c = base + std::to_string(i);
        scope.emplace_back(orig, c);
        return c;
    }

    std::string name_of(const std::string& v) const {
        for (auto it = scope.rbegin(); it != scope.rend(); ++it)
            if (it->first == v) return it->second;
        return v;
    }

    // ctx: 0 anywhere, 1 function position, 2 argument/atom position
    std::string go(const Term& t, int ctx) {
        switch (t->kind) {
        case TermKind::Var: return name_of(t->name);
        case TermKind::Lam:
        case TermKind::BangLam: {
            std::string x = bind(t->name);
            std::string s = std::string(uni ? "λ" : "\\") + (t->kind == TermKind::BangLam ? "!" : "") + x + "." + go(t->kids[0], 0);
            scope.pop_back();
            return ctx > 0 ? "(" + s + ")" : s;
        }
        case TermKind::App: {
            std::string s = go(t->kids[0], 1) + " " + go(t->kids[1], 2);
            return ctx == 2 ? "(" + s + ")" : s;
        }
        case TermKind::Bang: return "!" + go(t->kids[0], 2);
        case TermKind::Der: return "d(" + go(t->kids[0], 0) + ")";
        case TermKind::Proj: return "proj(" + go(t->kids[0], 0) + ")";
        case TermKind::Pair:
            return std::string(uni ? "⟨" : "<") + go(t->kids[0], 0) + ", " + go(t->kids[1], 0) + (uni ? "⟩" : ">");
        case TermKind::Copy: {
            std::string s = "copy^{" + go(t->kids[0], 0) + "} " + go(t->kids[1], 2) + " as ";
            std::string x1 = bind(t->name);
            std::string p = go(t->kids[2], 0);
            scope.pop_back();
            std::string x2 = bind(t->name2);
            std::string q = go(t->kids[3], 0);
            scope.pop_back();
            return s + x1 + ", " + x2 + " in " + (uni ? "⟨" : "<") + p + ", " + q + (uni ? "⟩" : ">");
        }
        }
        return "?";
    }
};

struct TypePrinter {
    bool uni;
    // ctx: 0 top, 1 left of ⊸, 2 operand of &, 3 atom
    std::string go(const Type& t, int ctx) {
        if (t->kind != TypeKind::Var && t->kind != TypeKind::Meta) {
            if (type_equal(t, unit_type())) return uni ? "𝟏" : "1";
            if (type_equal(t, bool_type())) return uni ? "𝐁" : "B";
        }
        switch (t->kind) {
        case TypeKind::Var: return t->name;
        case TypeKind::Meta: return "?" + std::to_string(t->meta);
        case TypeKind::Imp: {
            std::string s = go(t->kids[0], 1) + (uni ? " ⊸ " : " -o ") + go(t->kids[1], 0);
            return ctx >= 1 ? "(" + s + ")" : s;
        }
        case TypeKind::With: {
            std::string s = go(t->kids[0], 3) + " & " + go(t->kids[1], 3);
            return ctx >= 2 ? "(" + s + ")" : s;
        }
        case TypeKind::Forall: {
            std::string s = std::string(uni ? "∀" : "forall ") + t->name + ". " + go(t->kids[0], 0);
            return ctx >= 1 ? "(" + s + ")" : s;
        }
        case TypeKind::Bang: return "!" + go(t->kids[0], 3);
        }
        return "?";
    }
};

} // namespace

Sugared parse_sugared(const std::string& text) {
    Parser p;
    p.toks = tokenize(text);
    auto t = p.term();
    if (p.peek().kind != Tok::End) p.fail("unexpected trailing input");
    return t;
}

Elaborated parse_term(const std::string& text, bool require_s_linear) {
    Parser p;
    p.toks = tokenize(text);
    auto s = p.term();
    if (p.peek().kind != Tok::End) p.fail("unexpected trailing input");
    auto e = elaborate(s);
    if (require_s_linear) {
        if (auto v = s_linearity_violation(e.term)) {
            std::string msg = *v;
            std::size_t line = 1, col = 1;
            for (const auto& [u, at] : p.binder_at) {
                auto q = msg.find("'" + u + "'");
                if (q == std::string::npos) continue;
                msg.replace(q + 1, u.size(), base_name(u));
                line = at.first;
                col = at.second;
                break;
            }
            throw Error("not-s-linear", std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
        }
    }
    return e;
}

Type parse_type(const std::string& text) {
    Parser p;
    p.toks = tokenize(text);
    auto t = p.type();
    if (p.peek().kind != Tok::End) p.fail("unexpected trailing input");
    return t;
}

std::string print_term(const Term& t, bool unicode) {
    TermPrinter p{unicode, free_vars(t), {}};
    return p.go(t, 0);
}

std::string print_type(const Type& t, bool unicode) {
    TypePrinter p{unicode};
    return p.go(t, 0);
}

} // namespace psta
