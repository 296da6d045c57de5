#include "psta/type.hpp"

#include "psta/term.hpp"

namespace psta {

namespace {

Type make(TypeKind k, std::string name, std::vector<Type> kids, int meta = -1) {
    auto n = std::make_shared<TypeNode>();
    n->kind = k;
    n->name = std::move(name);
    n->kids = std::move(kids);
    n->meta = meta;
    return n;
}

} // namespace

Type tvar(std::string name) { return make(TypeKind::Var, std::move(name), {}); }
Type imp(Type a, Type b) { return make(TypeKind::Imp, {}, {std::move(a), std::move(b)}); }
Type with(Type a, Type b) { return make(TypeKind::With, {}, {std::move(a), std::move(b)}); }
Type forall(std::string a, Type body) { return make(TypeKind::Forall, std::move(a), {std::move(body)}); }
Type tbang(Type body) { return make(TypeKind::Bang, {}, {std::move(body)}); }
Type tmeta(int id) { return make(TypeKind::Meta, {}, {}, id); }

Type tbangs(std::size_t n, Type t) {
    while (n--) t = tbang(t);
    return t;
}

Type imps(const std::vector<Type>& args, Type result) {
    for (auto it = args.rbegin(); it != args.rend(); ++it) result = imp(*it, result);
    return result;
}

static void tfv(const Type& t, std::multiset<std::string>& bound, std::set<std::string>& out) {
    switch (t->kind) {
    case TypeKind::Var:
        if (!bound.count(t->name)) out.insert(t->name);
        return;
    case TypeKind::Forall:
        bound.insert(t->name);
        tfv(t->kids[0], bound, out);
        bound.erase(bound.find(t->name));
        return;
    default:
        for (const auto& k : t->kids) tfv(k, bound, out);
    }
}

std::set<std::string> type_free_vars(const Type& t) {
    std::multiset<std::string> bound;
    std::set<std::string> out;
    tfv(t, bound, out);
    return out;
}

static bool type_occurs_free(const Type& t, const std::string& a) {
    switch (t->kind) {
    case TypeKind::Var: return t->name == a;
    case TypeKind::Forall: return t->name != a && type_occurs_free(t->kids[0], a);
    default:
        for (const auto& k : t->kids)
            if (type_occurs_free(k, a)) return true;
        return false;
    }
}

static Type subst_rec(const Type& t, const std::string& a, const Type& repl, const std::set<std::string>& repl_fv) {
    switch (t->kind) {
    case TypeKind::Var: return t->name == a ? repl : t;
    case TypeKind::Meta: return t;
    case TypeKind::Forall: {
        if (t->name == a || !type_occurs_free(t->kids[0], a)) return t;
        std::string b = t->name;
        Type body = t->kids[0];
        if (repl_fv.count(b)) {
            std::string nb = fresh_name(b);
            body = subst_rec(body, b, tvar(nb), {nb});
            b = nb;
        }
        return forall(b, subst_rec(body, a, repl, repl_fv));
    }
    default: {
        std::vector<Type> kids;
        bool changed = false;
        for (const auto& k : t->kids) {
            kids.push_back(subst_rec(k, a, repl, repl_fv));
            changed = changed || kids.back() != k;
        }
        return changed ? make(t->kind, t->name, std::move(kids)) : t;
    }
    }
}

Type type_substitute(const Type& t, const std::string& a, const Type& repl) {
    return subst_rec(t, a, repl, type_free_vars(repl));
}

std::size_t type_size(const Type& t) {
    std::size_t s = 1;
    for (const auto& k : t->kids) s += type_size(k);
    return s;
}

bool is_linear(const Type& t) { return t->kind != TypeKind::Bang; }

bool is_well_formed(const Type& t) {
    switch (t->kind) {
    case TypeKind::Var:
    case TypeKind::Meta: return true;
    case TypeKind::Imp: return is_well_formed(t->kids[0]) && is_linear(t->kids[1]) && is_well_formed(t->kids[1]);
    case TypeKind::With:
        return is_linear(t->kids[0]) && is_linear(t->kids[1]) && is_well_formed(t->kids[0]) &&
               is_well_formed(t->kids[1]);
    case TypeKind::Forall: return is_linear(t->kids[0]) && is_well_formed(t->kids[0]);
    case TypeKind::Bang: return is_well_formed(t->kids[0]);
    }
    return false;
}

static bool lazy_rec(const Type& t, bool positive) {
    switch (t->kind) {
    case TypeKind::Var: return true;
    case TypeKind::Meta: return true;
    case TypeKind::Bang: return false;
    case TypeKind::Imp: return lazy_rec(t->kids[0], !positive) && lazy_rec(t->kids[1], positive);
    case TypeKind::With: return lazy_rec(t->kids[0], positive) && lazy_rec(t->kids[1], positive);
    case TypeKind::Forall: return positive && lazy_rec(t->kids[0], positive);
    }
    return false;
}

bool is_forall_bang_lazy(const Type& t) { return lazy_rec(t, true); }

bool has_meta(const Type& t) {
    if (t->kind == TypeKind::Meta) return true;
    for (const auto& k : t->kids)
        if (has_meta(k)) return true;
    return false;
}

static void tkey(const Type& t, std::vector<std::string>& scope, std::string& out) {
    switch (t->kind) {
    case TypeKind::Var:
        for (std::size_t i = scope.size(); i-- > 0;) {
            if (scope[i] == t->name) {
                out += '#' + std::to_string(scope.size() - 1 - i) + '.';
                return;
            }
        }
        out += '$' + t->name + ';';
        return;
    case TypeKind::Meta: out += '?' + std::to_string(t->meta) + ';'; return;
    case TypeKind::Imp: out += 'i'; break;
    case TypeKind::With: out += 'w'; break;
    case TypeKind::Bang: out += '!'; break;
    case TypeKind::Forall:
        out += 'A';
        scope.push_back(t->name);
        tkey(t->kids[0], scope, out);
        scope.pop_back();
        return;
    }
    for (const auto& k : t->kids) tkey(k, scope, out);
}

std::string type_key(const Type& t) {
    std::string out;
    std::vector<std::string> scope;
    tkey(t, scope, out);
    return out;
}

bool type_equal(const Type& a, const Type& b) { return a == b || type_key(a) == type_key(b); }

Type unit_type() {
    static const Type one = forall("a", imp(tvar("a"), tvar("a")));
    return one;
}

} // namespace psta
