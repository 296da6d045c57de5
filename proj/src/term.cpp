#include "psta/term.hpp"

#include "psta/error.hpp"

#include <atomic>
#include <functional>

namespace psta {

namespace {

Term make(TermKind k, std::string name, std::string name2, std::vector<Term> kids) {
    auto n = std::make_shared<TermNode>();
    n->kind = k;
    n->name = std::move(name);
    n->name2 = std::move(name2);
    n->kids = std::move(kids);
    std::size_t s = 0;
    for (const auto& c : n->kids) s += c->size;
    switch (k) {
    case TermKind::Var: s = 1; break;
    case TermKind::App:
    case TermKind::Pair: s += 1; break;
    case TermKind::Copy: s += 2; break;
    default: s += 1; break;
    }
    n->size = s;
    return n;
}

} // namespace

Term var(std::string name) { return make(TermKind::Var, std::move(name), {}, {}); }
Term lam(std::string x, Term body) { return make(TermKind::Lam, std::move(x), {}, {std::move(body)}); }
Term bang_lam(std::string x, Term body) { return make(TermKind::BangLam, std::move(x), {}, {std::move(body)}); }
Term app(Term f, Term a) { return make(TermKind::App, {}, {}, {std::move(f), std::move(a)}); }
Term bang(Term body) { return make(TermKind::Bang, {}, {}, {std::move(body)}); }
Term der(Term body) { return make(TermKind::Der, {}, {}, {std::move(body)}); }
Term pair(Term l, Term r) { return make(TermKind::Pair, {}, {}, {std::move(l), std::move(r)}); }
Term proj(Term body) { return make(TermKind::Proj, {}, {}, {std::move(body)}); }
Term copy(Term bound, Term scrutinee, std::string x1, std::string x2, Term l, Term r) {
    return make(TermKind::Copy, std::move(x1), std::move(x2),
                {std::move(bound), std::move(scrutinee), std::move(l), std::move(r)});
}

Term apps(Term f, const std::vector<Term>& args) {
    for (const auto& a : args) f = app(f, a);
    return f;
}

Term lams(const std::vector<std::string>& xs, Term body) {
    for (auto it = xs.rbegin(); it != xs.rend(); ++it) body = lam(*it, body);
    return body;
}

Term bangs(std::size_t n, Term t) {
    while (n--) t = bang(t);
    return t;
}

Term ders(std::size_t n, Term t) {
    while (n--) t = der(t);
    return t;
}

Term with_kids(const Term& t, std::vector<Term> kids) {
    bool same = kids.size() == t->kids.size();
    for (std::size_t i = 0; same && i < kids.size(); ++i) same = kids[i] == t->kids[i];
    if (same) return t;
    return make(t->kind, t->name, t->name2, std::move(kids));
}

std::size_t size(const Term& t) { return t->size; }

// Binder introduced for child i of t, or nullptr.
static const std::string* binder_for(const TermNode& t, std::size_t i) {
    switch (t.kind) {
    case TermKind::Lam:
    case TermKind::BangLam: return &t.name;
    case TermKind::Copy:
        if (i == 2) return &t.name;
        if (i == 3) return &t.name2;
        return nullptr;
    default: return nullptr;
    }
}

static void collect_free(const Term& t, std::multiset<std::string>& bound, std::set<std::string>& out) {
    if (t->kind == TermKind::Var) {
        if (!bound.count(t->name)) out.insert(t->name);
        return;
    }
    for (std::size_t i = 0; i < t->kids.size(); ++i) {
        const std::string* b = binder_for(*t, i);
        if (b) bound.insert(*b);
        collect_free(t->kids[i], bound, out);
        if (b) bound.erase(bound.find(*b));
    }
}

std::set<std::string> free_vars(const Term& t) {
    std::multiset<std::string> bound;
    std::set<std::string> out;
    collect_free(t, bound, out);
    return out;
}

std::size_t count_free(const Term& t, const std::string& x) {
    if (t->kind == TermKind::Var) return t->name == x ? 1 : 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < t->kids.size(); ++i) {
        const std::string* b = binder_for(*t, i);
        if (b && *b == x) continue;
        n += count_free(t->kids[i], x);
    }
    return n;
}

bool occurs_free(const Term& t, const std::string& x) {
    if (t->kind == TermKind::Var) return t->name == x;
    for (std::size_t i = 0; i < t->kids.size(); ++i) {
        const std::string* b = binder_for(*t, i);
        if (b && *b == x) continue;
        if (occurs_free(t->kids[i], x)) return true;
    }
    return false;
}

namespace {

// (total free occurrences, occurrences inside some !N or d(N))
struct OccCount {
    std::size_t total = 0;
    std::size_t boxed = 0;
};

void count_occ(const Term& t, const std::string& x, bool boxed, OccCount& c) {
    if (t->kind == TermKind::Var) {
        if (t->name == x) {
            ++c.total;
            if (boxed) ++c.boxed;
        }
        return;
    }
    bool inner = boxed || t->kind == TermKind::Bang || t->kind == TermKind::Der;
    for (std::size_t i = 0; i < t->kids.size(); ++i) {
        const std::string* b = binder_for(*t, i);
        if (b && *b == x) continue;
        count_occ(t->kids[i], x, inner, c);
    }
}

std::optional<std::string> check_binder(const std::string& kind, const std::string& x, const Term& body) {
    OccCount c;
    count_occ(body, x, false, c);
    if (c.total != 1)
        return kind + " binder '" + x + "' occurs " + std::to_string(c.total) + " times (must be exactly once)";
    if (c.boxed)
        return kind + " binder '" + x + "' occurs inside a !-box or dereliction";
    return std::nullopt;
}

} // namespace

std::optional<std::string> s_linearity_violation(const Term& t) {
    if (t->kind == TermKind::Lam)
        if (auto e = check_binder("linear abstraction", t->name, t->kids[0])) return e;
    if (t->kind == TermKind::Copy) {
        if (auto e = check_binder("copy", t->name, t->kids[2])) return e;
        if (auto e = check_binder("copy", t->name2, t->kids[3])) return e;
    }
    for (const auto& k : t->kids)
        if (auto e = s_linearity_violation(k)) return e;
    return std::nullopt;
}

bool is_s_linear(const Term& t) { return !s_linearity_violation(t).has_value(); }

static std::atomic<unsigned long> fresh_counter{0};

std::string base_name(const std::string& name) {
    auto p = name.find('#');
    return p == std::string::npos ? name : name.substr(0, p);
}

std::string fresh_name(const std::string& base) {
    return base_name(base) + "#" + std::to_string(++fresh_counter);
}

namespace {

struct Subst {
    const std::map<std::string, Term>& sigma;
    std::set<std::string> arg_fv;

    explicit Subst(const std::map<std::string, Term>& s) : sigma(s) {
        for (const auto& [k, v] : s) {
            auto fv = free_vars(v);
            arg_fv.insert(fv.begin(), fv.end());
        }
    }

    bool touches(const Term& t, const std::map<std::string, Term>& active) const {
        for (const auto& [k, v] : active)
            if (occurs_free(t, k)) return true;
        return false;
    }

    Term go(const Term& t, const std::map<std::string, Term>& active) {
        if (active.empty()) return t;
        if (t->kind == TermKind::Var) {
            auto it = active.find(t->name);
            return it == active.end() ? t : it->second;
        }
        std::vector<Term> kids;
        kids.reserve(t->kids.size());
        std::string n1 = t->name, n2 = t->name2;
        for (std::size_t i = 0; i < t->kids.size(); ++i) {
            const std::string* b = binder_for(*t, i);
            if (!b) {
                kids.push_back(go(t->kids[i], active));
                continue;
            }
            std::map<std::string, Term> inner = active;
            inner.erase(*b);
            Term body = t->kids[i];
            std::string nb = *b;
            if (!inner.empty() && arg_fv.count(*b) && touches(body, inner)) {
                nb = fresh_name(*b);
                body = go_rename(body, *b, nb);
            }
            if (t->kind == TermKind::Copy && i == 3) n2 = nb; else n1 = nb;
            kids.push_back(go(body, inner));
        }
        if (n1 == t->name && n2 == t->name2) return with_kids(t, std::move(kids));
        auto n = std::make_shared<TermNode>(*t);
        n->name = n1;
        n->name2 = n2;
        n->kids = std::move(kids);
        return n;
    }

    static Term go_rename(const Term& t, const std::string& from, const std::string& to) {
        std::map<std::string, Term> m{{from, var(to)}};
        Subst s(m);
        return s.go(t, m);
    }
};

} // namespace

Term substitute_many(const Term& t, const std::map<std::string, Term>& sigma) {
    Subst s(sigma);
    return s.go(t, sigma);
}

Term substitute(const Term& t, const std::string& x, const Term& arg) {
    return substitute_many(t, {{x, arg}});
}

namespace {

// Counts free occurrences of x and whether each is the immediate child of a d(.).
void scan_derelicted(const Term& t, const std::string& x, bool parent_der, std::size_t& total, bool& all_der) {
    if (t->kind == TermKind::Var) {
        if (t->name == x) {
            ++total;
            if (!parent_der) all_der = false;
        }
        return;
    }
    for (std::size_t i = 0; i < t->kids.size(); ++i) {
        const std::string* b = binder_for(*t, i);
        if (b && *b == x) continue;
        scan_derelicted(t->kids[i], x, t->kind == TermKind::Der, total, all_der);
    }
}

// Replace every free d(x) by y (y is fresh, so no capture is possible).
Term strip_der(const Term& t, const std::string& x, const std::string& y) {
    if (t->kind == TermKind::Der && t->kids[0]->kind == TermKind::Var && t->kids[0]->name == x) return var(y);
    if (t->kind == TermKind::Var) return t;
    std::vector<Term> kids;
    for (std::size_t i = 0; i < t->kids.size(); ++i) {
        const std::string* b = binder_for(*t, i);
        if (b && *b == x) kids.push_back(t->kids[i]);
        else kids.push_back(strip_der(t->kids[i], x, y));
    }
    return with_kids(t, std::move(kids));
}

} // namespace

Term surface_substitute(const Term& t, const std::string& x, const Term& arg) {
    Term m = t;
    std::string cur = x;
    Term n = arg;
    while (n->kind == TermKind::Bang) {
        std::size_t total = 0;
        bool all_der = true;
        scan_derelicted(m, cur, false, total, all_der);
        if (total == 0) return m;
        if (!all_der) break;
        std::string y = fresh_name(cur);
        m = strip_der(m, cur, y);
        cur = y;
        n = n->kids[0];
    }
    return substitute(m, cur, n);
}

static bool value_shape(const Term& t) {
    switch (t->kind) {
    case TermKind::Var: return true;
    case TermKind::Lam: return value_shape(t->kids[0]);
    case TermKind::App:
        if (t->kids[0]->kind == TermKind::Lam) return false;
        return value_shape(t->kids[0]) && value_shape(t->kids[1]);
    case TermKind::Pair: return value_shape(t->kids[0]) && value_shape(t->kids[1]);
    default: return false;
    }
}

bool is_value(const Term& t) { return value_shape(t) && free_vars(t).empty(); }

namespace {

void key_of(const Term& t, std::vector<std::string>& scope, std::string& out) {
    switch (t->kind) {
    case TermKind::Var: {
        for (std::size_t i = scope.size(); i-- > 0;) {
            if (scope[i] == t->name) {
                out += '#';
                out += std::to_string(scope.size() - 1 - i);
                out += '.';
                return;
            }
        }
        out += '$';
        out += t->name;
        out += ';';
        return;
    }
    case TermKind::Lam: out += 'l'; break;
    case TermKind::BangLam: out += 'b'; break;
    case TermKind::App: out += 'a'; break;
    case TermKind::Bang: out += '!'; break;
    case TermKind::Der: out += 'd'; break;
    case TermKind::Pair: out += 'p'; break;
    case TermKind::Proj: out += 'j'; break;
    case TermKind::Copy: out += 'c'; break;
    }
    for (std::size_t i = 0; i < t->kids.size(); ++i) {
        const std::string* b = binder_for(*t, i);
        if (b) scope.push_back(*b);
        key_of(t->kids[i], scope, out);
        if (b) scope.pop_back();
    }
}

} // namespace

std::string canonical_key(const Term& t) {
    std::string out;
    out.reserve(t->size * 2);
    std::vector<std::string> scope;
    key_of(t, scope, out);
    return out;
}

bool alpha_equal(const Term& a, const Term& b) {
    return a == b || (a->size == b->size && canonical_key(a) == canonical_key(b));
}

Term subterm_at(const Term& t, const std::vector<int>& path) {
    Term cur = t;
    for (int i : path) {
        if (i < 0 || static_cast<std::size_t>(i) >= cur->kids.size())
            throw Error("invalid-path", "path does not address a subterm");
        cur = cur->kids[i];
    }
    return cur;
}

static Term replace_rec(const Term& t, const std::vector<int>& path, std::size_t at, const Term& repl) {
    if (at == path.size()) return repl;
    int i = path[at];
    if (i < 0 || static_cast<std::size_t>(i) >= t->kids.size())
        throw Error("invalid-path", "path does not address a subterm");
    std::vector<Term> kids = t->kids;
    kids[i] = replace_rec(t->kids[i], path, at + 1, repl);
    return with_kids(t, std::move(kids));
}

Term replace_at(const Term& t, const std::vector<int>& path, const Term& repl) {
    return replace_rec(t, path, 0, repl);
}

} // namespace psta
