#include "psta/sugar.hpp"

#include "psta/error.hpp"

#include <set>

namespace psta {

namespace sg {

namespace {
Sugared node(SugarKind k, std::vector<Sugared> kids = {}, std::string name = {}, std::string name2 = {}) {
    auto n = std::make_shared<SugarNode>();
    n->kind = k;
    n->kids = std::move(kids);
    n->name = std::move(name);
    n->name2 = std::move(name2);
    return n;
}
} // namespace

Sugared var(const std::string& x) { return node(SugarKind::Var, {}, x); }
Sugared lam(const std::string& x, Sugared body) { return node(SugarKind::Lam, {std::move(body)}, x); }
Sugared lams(const std::vector<std::string>& xs, Sugared body) {
    for (auto it = xs.rbegin(); it != xs.rend(); ++it) body = lam(*it, body);
    return body;
}
Sugared bang_lam(const std::string& x, Sugared body) { return node(SugarKind::BangLam, {std::move(body)}, x); }
Sugared app(Sugared f, Sugared a) { return node(SugarKind::App, {std::move(f), std::move(a)}); }
Sugared apps(Sugared f, const std::vector<Sugared>& args) {
    for (const auto& a : args) f = app(f, a);
    return f;
}
Sugared bang(Sugared t) { return node(SugarKind::Bang, {std::move(t)}); }
Sugared bangs(std::size_t n, Sugared t) {
    while (n--) t = bang(t);
    return t;
}
Sugared der(Sugared t) { return node(SugarKind::Der, {std::move(t)}); }
Sugared ders(std::size_t n, Sugared t) {
    while (n--) t = der(t);
    return t;
}
Sugared pair(Sugared l, Sugared r) { return node(SugarKind::Pair, {std::move(l), std::move(r)}); }
Sugared proj(Sugared t) { return node(SugarKind::Proj, {std::move(t)}); }
Sugared copy(Sugared v, Sugared n, const std::string& x1, const std::string& x2, Sugared p, Sugared q) {
    return node(SugarKind::Copy, {std::move(v), std::move(n), std::move(p), std::move(q)}, x1, x2);
}
Sugared tensor(const std::vector<Sugared>& parts) {
    if (parts.size() < 2) throw Error("bad-sugar", "a tensor needs at least two components");
    return node(SugarKind::Tensor, parts);
}
Sugared let_tensor(Sugared scrutinee, const std::vector<std::string>& binders, Sugared body) {
    if (binders.size() < 2) throw Error("bad-sugar", "a tensor pattern needs at least two binders");
    auto n = std::make_shared<SugarNode>();
    n->kind = SugarKind::LetTensor;
    n->kids = {std::move(scrutinee), std::move(body)};
    n->binders = binders;
    return n;
}
Sugared let_unit(Sugared scrutinee, Sugared body) { return node(SugarKind::LetUnit, {std::move(scrutinee), std::move(body)}); }
Sugared unit() { return node(SugarKind::Unit); }
Sugared if_(Sugared c, Sugared m, Sugared n, Sugared eraser) {
    std::vector<Sugared> kids{std::move(c), std::move(m), std::move(n)};
    if (eraser) kids.push_back(std::move(eraser));
    return node(SugarKind::If, std::move(kids));
}
Sugared annot(Sugared t, Type ty) {
    auto n = std::make_shared<SugarNode>();
    n->kind = SugarKind::Annot;
    n->kids = {std::move(t)};
    n->type = std::move(ty);
    return n;
}
Sugared embed(Term t) {
    auto n = std::make_shared<SugarNode>();
    n->kind = SugarKind::Embed;
    n->raw = std::move(t);
    return n;
}
Sugared compose(Sugared m, Sugared n) {
    auto z = fresh_name("z");
    return lam(z, app(std::move(m), app(std::move(n), var(z))));
}
Sugared compose_all(const std::vector<Sugared>& fs) {
    if (fs.empty()) {
        auto z = fresh_name("z");
        return lam(z, var(z));
    }
    Sugared acc = fs.back();
    for (std::size_t i = fs.size() - 1; i-- > 0;) acc = compose(fs[i], acc);
    return acc;
}

} // namespace sg

Type tensor_type(const std::vector<Type>& parts) {
    std::set<std::string> used;
    for (const auto& p : parts)
        for (const auto& v : type_free_vars(p)) used.insert(v);
    std::string a = "a";
    for (int i = 0; used.count(a); ++i) a = "a" + std::to_string(i);
    return forall(a, imp(imps(parts, tvar(a)), tvar(a)));
}

Type bool_type() {
    static const Type b = forall("a", imps({tvar("a"), tvar("a")}, tensor_type({tvar("a"), tvar("a")})));
    return b;
}

Type bool_tuple_type(std::size_t n) {
    if (n == 1) return bool_type();
    return tensor_type(std::vector<Type>(n, bool_type()));
}

Type nat_type(std::size_t i) {
    auto a = tvar("a");
    return forall("a", imps({tbangs(i, imp(a, a)), a}, a));
}

Type string_type(std::size_t i) {
    auto a = tvar("a");
    return forall("a", imps({tbangs(i, imps({bool_type(), a}, a)), a}, a));
}

namespace {

// tensor hint with n fresh template components: ∀α.(?0⊸…⊸?n-1⊸α)⊸α
Type tensor_template(std::size_t n) {
    std::vector<Type> parts;
    for (std::size_t i = 0; i < n; ++i) parts.push_back(tmeta(static_cast<int>(i)));
    return forall("a", imp(imps(parts, tvar("a")), tvar("a")));
}

struct Elab {
    HintTable hints;
    std::vector<Term> keep; // hint keys must stay alive

    Term hinted(Term t, const Type& ty) {
        hints[t.get()] = ty;
        keep.push_back(t);
        return t;
    }

    Term eraser_b() {
        // λz. let z I I be x⊗y in (let y be I in x)
        auto z = fresh_name("z"), x = fresh_name("x"), y = fresh_name("y");
        return run(sg::lam(z, sg::let_tensor(sg::apps(sg::var(z), {sg::unit(), sg::unit()}), {x, y},
                                             sg::let_unit(sg::var(y), sg::var(x)))));
    }

    Term run(const Sugared& s) {
        switch (s->kind) {
        case SugarKind::Var: return var(s->name);
        case SugarKind::Lam: return lam(s->name, run(s->kids[0]));
        case SugarKind::BangLam: return bang_lam(s->name, run(s->kids[0]));
        case SugarKind::App: return app(run(s->kids[0]), run(s->kids[1]));
        case SugarKind::Bang: return bang(run(s->kids[0]));
        case SugarKind::Der: return der(run(s->kids[0]));
        case SugarKind::Pair: return pair(run(s->kids[0]), run(s->kids[1]));
        case SugarKind::Proj: return proj(run(s->kids[0]));
        case SugarKind::Copy:
            return copy(run(s->kids[0]), run(s->kids[1]), s->name, s->name2, run(s->kids[2]), run(s->kids[3]));
        case SugarKind::Tensor: {
            auto f = fresh_name("f");
            std::vector<Term> args;
            for (const auto& k : s->kids) args.push_back(run(k));
            return hinted(lam(f, apps(var(f), args)), tensor_template(args.size()));
        }
        case SugarKind::LetTensor: {
            Term scrut = hinted(run(s->kids[0]), tensor_template(s->binders.size()));
            Term body = run(s->kids[1]);
            for (auto it = s->binders.rbegin(); it != s->binders.rend(); ++it) {
                if (!it->empty() && (*it)[0] == '!') body = bang_lam(it->substr(1), body);
                else body = lam(*it, body);
            }
            return app(scrut, body);
        }
        case SugarKind::LetUnit: {
            Term scrut = hinted(run(s->kids[0]), unit_type());
            return app(scrut, run(s->kids[1]));
        }
        case SugarKind::Unit: {
            auto x = fresh_name("x");
            return hinted(lam(x, var(x)), unit_type());
        }
        case SugarKind::If: {
            auto x = fresh_name("x"), y = fresh_name("y");
            Term cmn = hinted(apps(run(s->kids[0]), {run(s->kids[1]), run(s->kids[2])}), tensor_template(2));
            Term er = s->kids.size() > 3 ? run(s->kids[3]) : eraser_b();
            Term sel = lam(x, lam(y, app(hinted(app(er, var(y)), unit_type()), var(x))));
            return app(cmn, sel);
        }
        case SugarKind::Annot: return hinted(run(s->kids[0]), s->type);
        case SugarKind::Embed: return s->raw;
        }
        throw Error("bad-sugar", "unknown sugar node");
    }
};

} // namespace

Elaborated elaborate(const Sugared& s) {
    Elab e;
    Elaborated out;
    out.term = e.run(s);
    out.hints = std::move(e.hints);
    return out;
}

} // namespace psta
