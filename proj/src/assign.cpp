#include "psta/assign.hpp"

#include "psta/syntax.hpp"

#include <functional>
#include <optional>
#include <set>

namespace psta {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("assign-failed", msg); }

struct Proto;
using PP = std::shared_ptr<Proto>;
struct Proto {
    Rule rule;
    Payload payload;
    std::vector<PP> prem;
};

PP mk(Rule r, Payload p, std::vector<PP> prem = {}) {
    return std::make_shared<Proto>(Proto{r, std::move(p), std::move(prem)});
}

// A term position. Binders are renamed apart so logical variable names are unique.
struct PNode {
    const TermNode* orig;
    TermKind kind;
    std::string name, name2;
    std::vector<int> kids;
    int parent = -1;
    int end = 0; // one past the last position of the subtree
};

struct MRec {
    std::string var;
    std::vector<std::string> merged;
    Type sigma;
};

class Builder {
public:
    explicit Builder(const HintTable& h) : hints_(h) {}

    std::vector<PNode> nodes;
    std::map<std::string, std::vector<int>> occ;
    std::set<std::string> binders;

    int index(const Term& t, int parent, std::map<std::string, std::string>& scope) {
        int i = static_cast<int>(nodes.size());
        nodes.push_back({t.get(), t->kind, t->name, t->name2, {}, parent, 0});
        auto bound = [&](const std::string& x, const Term& body) {
            auto fresh = fresh_name(base_name(x));
            binders.insert(fresh);
            auto saved = scope.find(x) == scope.end() ? std::optional<std::string>{} : scope[x];
            scope[x] = fresh;
            int k = index(body, i, scope);
            if (saved) scope[x] = *saved;
            else scope.erase(x);
            return std::make_pair(fresh, k);
        };
        switch (t->kind) {
        case TermKind::Var: {
            auto it = scope.find(t->name);
            auto name = it == scope.end() ? t->name : it->second;
            nodes[i].name = name;
            var_at_[i] = name;
            occ[name].push_back(i);
            break;
        }
        case TermKind::Lam:
        case TermKind::BangLam: {
            auto [x, k] = bound(t->name, t->kids[0]);
            nodes[i].name = x;
            nodes[i].kids = {k};
            break;
        }
        case TermKind::Copy: {
            int v = index(t->kids[0], i, scope);
            int n = index(t->kids[1], i, scope);
            auto [x1, p] = bound(t->name, t->kids[2]);
            auto [x2, q] = bound(t->name2, t->kids[3]);
            nodes[i].name = x1;
            nodes[i].name2 = x2;
            nodes[i].kids = {v, n, p, q};
            break;
        }
        default:
            for (const auto& k : t->kids) {
                int c = index(k, i, scope);
                nodes[i].kids.push_back(c);
            }
        }
        nodes[i].end = static_cast<int>(nodes.size());
        return i;
    }

    // v : T becomes available for the subtree `body`. Linear variables go
    // straight into ctx; banged ones get their m nodes (appended to ms,
    // innermost first) or stay for a single boxed occurrence.
    void introduce(const std::string& v, const Type& T, int body, Context& ctx, std::vector<MRec>& ms) {
        Type t = resolve(T);
        std::vector<int> ps = occ.count(v) ? occ[v] : std::vector<int>{};
        if (t->kind != TypeKind::Bang) {
            if (ps.size() != 1)
                fail("linear variable '" + base_name(v) + "' is used " + std::to_string(ps.size()) + " times");
            ctx[v] = T;
            return;
        }
        const Type& sigma = t->kids[0];
        if (ps.empty()) {
            ms.push_back({v, {}, sigma});
            return;
        }
        // a single boxed occurrence is handed to the enclosing sp; otherwise
        // every occurrence is a dereliction merged by one m (and may itself
        // sit inside a box when σ is exponential)
        if (ps.size() == 1 && boxed(ps[0], body)) {
            ctx[v] = T;
            return;
        }
        std::vector<std::string> merged;
        std::vector<MRec> inner;
        for (int p : ps) {
            int d = nodes[p].parent;
            if (d < body || nodes[d].kind != TermKind::Der)
                fail("banged variable '" + base_name(v) + "' used more than once or at surface without dereliction");
            auto vi = fresh_name(base_name(v));
            var_at_.erase(p);
            var_at_[d] = vi;
            occ[vi] = {d};
            merged.push_back(vi);
        }
        occ.erase(v);
        for (const auto& vi : merged) introduce(vi, sigma, body, ctx, ms);
        ms.push_back({v, merged, sigma});
    }

    PP wrap(PP d, const std::vector<MRec>& ms) {
        for (const auto& r : ms) {
            Payload p;
            p.var = r.var;
            p.merged = r.merged;
            p.type = r.sigma;
            d = mk(Rule::M, std::move(p), {d});
        }
        return d;
    }

    PP check(int p, const Type& goal, const Context& ctx) {
        auto h = hints_.find(nodes[p].orig);
        if (h != hints_.end()) {
            Type ht = instantiate(h->second);
            PP d = check_core(p, ht, ctx);
            return subsume(d, ht, goal, p);
        }
        return check_core(p, goal, ctx);
    }

    Derivation build(const PP& d) {
        std::vector<Derivation> prem;
        for (const auto& q : d->prem) prem.push_back(build(q));
        Payload p = d->payload;
        if (p.type) p.type = finish(p.type);
        return rebuild(make_raw(d->rule, p, {}, {}), std::move(prem));
    }

private:
    const HintTable& hints_;
    std::map<int, std::string> var_at_;
    std::vector<Type> sol_;
    std::vector<char> lin_;
    std::vector<int> trail_;
    std::set<std::string> rigid_;

    bool boxed(int p, int body) const {
        for (int a = nodes[p].parent; a != -1 && a >= body; a = nodes[a].parent)
            if (nodes[a].kind == TermKind::Bang) return true;
        return false;
    }

    bool occurs_in(const std::string& v, int q) const {
        auto it = occ.find(v);
        if (it == occ.end()) return false;
        for (int p : it->second)
            if (p >= q && p < nodes[q].end) return true;
        return false;
    }

    Context restrict(const Context& ctx, int q) const {
        Context out;
        for (const auto& [v, t] : ctx)
            if (occurs_in(v, q)) out.emplace(v, t);
        return out;
    }

    std::string where(int p) const {
        return "at '" + print_term(std::shared_ptr<const TermNode>(std::shared_ptr<const TermNode>{}, nodes[p].orig)) + "'";
    }

    // ---- placeholders

    Type meta(bool linear) {
        sol_.push_back(nullptr);
        lin_.push_back(linear);
        return tmeta(static_cast<int>(sol_.size()) - 1);
    }

    Type resolve(Type t) const {
        while (t->kind == TypeKind::Meta && t->meta >= 0 && t->meta < static_cast<int>(sol_.size()) && sol_[t->meta])
            t = sol_[t->meta];
        return t;
    }

    Type zonk(const Type& t) const {
        Type r = resolve(t);
        if (r->kids.empty()) return r;
        std::vector<Type> ks;
        bool same = true;
        for (const auto& k : r->kids) {
            ks.push_back(zonk(k));
            same = same && ks.back() == k;
        }
        if (same) return r;
        auto n = std::make_shared<TypeNode>(*r);
        n->kids = std::move(ks);
        return n;
    }

    Type finish(const Type& t) const {
        Type r = resolve(t);
        if (r->kind == TypeKind::Meta) return unit_type();
        if (r->kids.empty()) return r;
        auto n = std::make_shared<TypeNode>(*r);
        for (auto& k : n->kids) k = finish(k);
        return n;
    }

    Type instantiate(const Type& tmpl) {
        std::map<int, Type> fresh;
        std::function<Type(const Type&)> go = [&](const Type& t) -> Type {
            if (t->kind == TypeKind::Meta) {
                auto it = fresh.find(t->meta);
                if (it == fresh.end()) it = fresh.emplace(t->meta, meta(false)).first;
                return it->second;
            }
            if (t->kids.empty()) return t;
            auto n = std::make_shared<TypeNode>(*t);
            for (auto& k : n->kids) k = go(k);
            return n;
        };
        return go(tmpl);
    }

    bool occurs_meta(int m, const Type& t) const {
        Type r = resolve(t);
        if (r->kind == TypeKind::Meta) return r->meta == m;
        for (const auto& k : r->kids)
            if (occurs_meta(m, k)) return true;
        return false;
    }

    void set(int m, Type t) {
        sol_[m] = std::move(t);
        trail_.push_back(m);
    }

    bool bind(int m, const Type& t0) {
        Type t = resolve(t0);
        if (t->kind == TypeKind::Meta) {
            if (t->meta == m) return true;
            if (lin_[m] && !lin_[t->meta]) set(t->meta, tmeta(m));
            else set(m, t);
            return true;
        }
        if (lin_[m] && t->kind == TypeKind::Bang) return false;
        if (occurs_meta(m, t)) return false;
        if (!rigid_.empty()) {
            for (const auto& a : type_free_vars(zonk(t)))
                if (rigid_.count(a)) return false;
        }
        set(m, t);
        return true;
    }

    bool unify(const Type& a0, const Type& b0) {
        Type a = resolve(a0), b = resolve(b0);
        if (a->kind == TypeKind::Meta) return bind(a->meta, b);
        if (b->kind == TypeKind::Meta) return bind(b->meta, a);
        if (a->kind != b->kind) return false;
        switch (a->kind) {
        case TypeKind::Var: return a->name == b->name;
        case TypeKind::Forall: {
            auto c = fresh_name("r");
            Type ab = type_substitute(zonk(a->kids[0]), a->name, tvar(c));
            Type bb = type_substitute(zonk(b->kids[0]), b->name, tvar(c));
            rigid_.insert(c);
            bool ok = unify(ab, bb);
            rigid_.erase(c);
            return ok;
        }
        default:
            for (std::size_t i = 0; i < a->kids.size(); ++i)
                if (!unify(a->kids[i], b->kids[i])) return false;
            return true;
        }
    }

    void rollback(std::size_t n) {
        while (trail_.size() > n) {
            sol_[trail_.back()] = nullptr;
            trail_.pop_back();
        }
    }

    std::string show(const Type& t) const { return print_type(finish(t)); }

    // Instantiates leading quantifiers of `have` until it matches `goal`.
    PP subsume(PP d, Type have, const Type& goal, int p) {
        for (;;) {
            auto save = trail_.size();
            if (unify(have, goal)) return d;
            rollback(save);
            Type h = resolve(have);
            if (h->kind != TypeKind::Forall)
                fail("type mismatch " + where(p) + ": have " + show(have) + ", expected " + show(goal));
            Type m = meta(true);
            Payload pl;
            pl.type = m;
            d = mk(Rule::ForallE, std::move(pl), {d});
            have = type_substitute(zonk(h->kids[0]), h->name, m);
        }
    }

    std::pair<PP, Type> synth(int p, const Context& ctx) {
        Type m = meta(false);
        PP d = check(p, m, ctx);
        return {d, m};
    }

    void expect_shape(Type& goal, const Type& shape, TypeKind kind, int p, const char* what) {
        goal = resolve(goal);
        if (goal->kind == TypeKind::Meta) unify(goal, shape);
        goal = resolve(goal);
        if (goal->kind != kind) fail(std::string(what) + " " + where(p) + " checked against " + show(goal));
    }

    PP check_core(int p, Type goal, const Context& ctx) {
        goal = resolve(goal);
        const PNode n = nodes[p];
        auto va = var_at_.find(p);
        if (goal->kind == TypeKind::Forall && va == var_at_.end()) {
            auto g = fresh_name(base_name(goal->name));
            PP d = check_core(p, type_substitute(zonk(goal->kids[0]), goal->name, tvar(g)), ctx);
            Payload pl;
            pl.eigen = g;
            pl.bound = goal->name;
            return mk(Rule::ForallI, std::move(pl), {d});
        }
        if (va != var_at_.end()) {
            const auto& v = va->second;
            auto it = ctx.find(v);
            if (it == ctx.end()) fail("variable '" + base_name(v) + "' is not available " + where(p));
            if (ctx.size() != 1) fail("unused assumptions reach variable '" + base_name(v) + "'");
            if (resolve(it->second)->kind == TypeKind::Bang)
                fail("banged variable '" + base_name(v) + "' used without dereliction");
            Payload pl;
            pl.var = v;
            pl.type = it->second;
            return subsume(mk(Rule::Ax, std::move(pl)), it->second, goal, p);
        }
        switch (n.kind) {
        case TermKind::Var: fail("internal: unmapped variable");
        case TermKind::Der: fail("dereliction of a non-variable " + where(p));
        case TermKind::Lam: {
            expect_shape(goal, imp(meta(true), meta(true)), TypeKind::Imp, p, "abstraction");
            Type a = goal->kids[0];
            if (resolve(a)->kind == TypeKind::Bang) fail("linear abstraction " + where(p) + " at an exponential type");
            Context c2 = ctx;
            std::vector<MRec> ms;
            introduce(n.name, a, n.kids[0], c2, ms);
            PP b = check(n.kids[0], goal->kids[1], c2);
            Payload pl;
            pl.var = n.name;
            return mk(Rule::ImpIl, std::move(pl), {b});
        }
        case TermKind::BangLam: {
            expect_shape(goal, imp(tbang(meta(false)), meta(true)), TypeKind::Imp, p, "bang abstraction");
            Type a = goal->kids[0];
            if (resolve(a)->kind == TypeKind::Meta) unify(a, tbang(meta(false)));
            if (resolve(a)->kind != TypeKind::Bang) fail("bang abstraction " + where(p) + " at a linear type");
            Context c2 = ctx;
            std::vector<MRec> ms;
            introduce(n.name, a, n.kids[0], c2, ms);
            PP b = wrap(check(n.kids[0], goal->kids[1], c2), ms);
            Payload pl;
            pl.var = n.name;
            return mk(Rule::ImpIe, std::move(pl), {b});
        }
        case TermKind::App: {
            int f = n.kids[0], a = n.kids[1];
            Context cf = restrict(ctx, f), ca = restrict(ctx, a);
            for (const auto& [v, t] : cf)
                if (ca.count(v)) fail("variable '" + base_name(v) + "' used on both sides of an application");
            // an unannotated redex: the argument fixes the binder's type
            if ((nodes[f].kind == TermKind::Lam || nodes[f].kind == TermKind::BangLam) && !var_at_.count(f) &&
                !hints_.count(nodes[f].orig)) {
                Type ta = meta(false);
                PP pa = check(a, ta, ca);
                PP pf = check(f, imp(ta, goal), cf);
                return mk(Rule::ImpE, {}, {pf, pa});
            }
            auto [pf, tf] = synth(f, cf);
            for (Type r = resolve(tf); r->kind == TypeKind::Forall; r = resolve(tf)) {
                Type m = meta(true);
                Payload pl;
                pl.type = m;
                pf = mk(Rule::ForallE, std::move(pl), {pf});
                tf = type_substitute(zonk(r->kids[0]), r->name, m);
            }
            expect_shape(tf, imp(meta(false), meta(true)), TypeKind::Imp, f, "applied term");
            Type res = tf->kids[1];
            std::vector<Type> inst;
            for (;;) {
                auto save = trail_.size();
                if (unify(res, goal)) break;
                rollback(save);
                Type r = resolve(res);
                if (r->kind != TypeKind::Forall)
                    fail("type mismatch " + where(p) + ": result " + show(res) + ", expected " + show(goal));
                Type m = meta(true);
                inst.push_back(m);
                res = type_substitute(zonk(r->kids[0]), r->name, m);
            }
            PP pa = check(a, tf->kids[0], ca);
            PP d = mk(Rule::ImpE, {}, {pf, pa});
            for (const auto& m : inst) {
                Payload pl;
                pl.type = m;
                d = mk(Rule::ForallE, std::move(pl), {d});
            }
            return d;
        }
        case TermKind::Bang: {
            expect_shape(goal, tbang(meta(false)), TypeKind::Bang, p, "box");
            int body = n.kids[0];
            Context c2;
            std::vector<MRec> ms;
            std::vector<std::pair<std::string, std::string>> ren;
            for (const auto& [v, t0] : ctx) {
                Type t = resolve(t0);
                if (t->kind != TypeKind::Bang) fail("linear variable '" + base_name(v) + "' inside a box " + where(p));
                int q = occ.at(v).front();
                int d = nodes[q].parent;
                if (d < body || nodes[d].kind != TermKind::Der)
                    fail("boxed variable '" + base_name(v) + "' occurs without dereliction");
                auto v2 = fresh_name(base_name(v));
                var_at_.erase(q);
                var_at_[d] = v2;
                occ[v2] = {d};
                occ.erase(v);
                introduce(v2, t->kids[0], body, c2, ms);
                ren.emplace_back(v2, v);
            }
            PP b = wrap(check(body, goal->kids[0], c2), ms);
            Payload pl;
            pl.renaming = ren;
            return mk(Rule::Sp, std::move(pl), {b});
        }
        case TermKind::Pair: {
            if (!ctx.empty()) fail("pair " + where(p) + " has free variables");
            expect_shape(goal, with(meta(true), meta(true)), TypeKind::With, p, "pair");
            PP l = check(n.kids[0], goal->kids[0], {});
            PP r = check(n.kids[1], goal->kids[1], {});
            Payload pl;
            pl.bare = true;
            return mk(Rule::WithI, std::move(pl), {l, r});
        }
        case TermKind::Proj: {
            PP d = check(n.kids[0], with(goal, goal), ctx);
            return mk(Rule::WithE, {}, {d});
        }
        case TermKind::Copy: {
            int v = n.kids[0], s = n.kids[1], l = n.kids[2], r = n.kids[3];
            for (const auto& [x, t] : ctx)
                if (!occurs_in(x, s)) fail("copy " + where(p) + ": variable '" + base_name(x) + "' outside the copied term");
            auto [pn, c] = synth(s, ctx);
            PP pv = check(v, c, {});
            expect_shape(goal, with(meta(true), meta(true)), TypeKind::With, p, "copy");
            Context c1, c2;
            std::vector<MRec> ms;
            introduce(n.name, c, l, c1, ms);
            introduce(n.name2, c, r, c2, ms);
            PP pl_ = check(l, goal->kids[0], c1);
            PP pr_ = check(r, goal->kids[1], c2);
            Payload pl;
            pl.binder1 = n.name;
            pl.binder2 = n.name2;
            return mk(Rule::WithI, std::move(pl), {pn, pl_, pr_, pv});
        }
        }
        fail("unsupported term");
    }
};

} // namespace

Derivation assign(const Term& t, const Type& goal, const Context& ctx, const HintTable& hints) {
    Builder b(hints);
    std::map<std::string, std::string> scope;
    b.index(t, -1, scope);
    for (const auto& [v, ps] : b.occ)
        if (!b.binders.count(v) && !ctx.count(v)) throw Error("assign-failed", "free variable '" + v + "' has no assumption");
    Context c;
    std::vector<MRec> ms;
    for (const auto& [v, ty] : ctx) b.introduce(v, ty, 0, c, ms);
    auto d = b.wrap(b.check(0, goal, c), ms);
    Derivation out;
    try {
        out = b.build(d);
        check_derivation(out);
    } catch (const CheckError& e) {
        throw Error("assign-failed", std::string("derivation rejected: ") + e.what());
    }
    return out;
}

} // namespace psta
