// Structural transformations on derivations: renaming, weighted substitution
// and subject reduction.
#include "psta/derivation.hpp"

#include <algorithm>

namespace psta {

namespace {

using NameMap = std::map<std::string, std::string>;
using TypeMap = std::map<std::string, Type>;

std::string lookup(const NameMap& m, const std::string& x) {
    auto it = m.find(x);
    return it == m.end() ? x : it->second;
}

Type apply(const TypeMap& theta, Type t) {
    if (!t) return t;
    for (const auto& [a, b] : theta) t = type_substitute(t, a, b);
    return t;
}

// rho renames free term variables of the conclusion, theta substitutes free
// type variables; with `fresh` every binder gets a new name.
Derivation xform(const Derivation& d, const NameMap& rho, const TypeMap& theta, bool fresh) {
    auto bind = [&](const std::string& x) { return fresh ? fresh_name(base_name(x)) : x; };
    const auto& p = d->payload;
    switch (d->rule) {
    case Rule::Ax: return make_ax(lookup(rho, p.var), apply(theta, p.type));
    case Rule::ImpIl:
    case Rule::ImpIe: {
        auto x = bind(p.var);
        NameMap r = rho;
        r[p.var] = x;
        auto body = xform(d->premises[0], r, theta, fresh);
        return d->rule == Rule::ImpIl ? make_imp_il(body, x) : make_imp_ie(body, x);
    }
    case Rule::ImpE:
        return make_imp_e(xform(d->premises[0], rho, theta, fresh), xform(d->premises[1], rho, theta, fresh));
    case Rule::WithI: {
        if (p.bare)
            return psta::make_pair(xform(d->premises[0], {}, theta, fresh), xform(d->premises[1], {}, theta, fresh));
        auto x1 = bind(p.binder1), x2 = bind(p.binder2);
        return make_with_i(xform(d->premises[0], rho, theta, fresh),
                           xform(d->premises[1], {{p.binder1, x1}}, theta, fresh),
                           xform(d->premises[2], {{p.binder2, x2}}, theta, fresh),
                           xform(d->premises[3], {}, theta, fresh), x1, x2);
    }
    case Rule::WithE: return make_with_e(xform(d->premises[0], rho, theta, fresh));
    case Rule::Sp: {
        NameMap inner;
        std::vector<std::pair<std::string, std::string>> ren;
        for (const auto& [x, y] : p.renaming) {
            auto x2 = bind(x);
            inner[x] = x2;
            ren.emplace_back(x2, lookup(rho, y));
        }
        return make_sp(xform(d->premises[0], inner, theta, fresh), ren);
    }
    case Rule::M: {
        NameMap r = rho;
        r.erase(p.var);
        std::vector<std::string> merged;
        for (const auto& x : p.merged) {
            auto x2 = bind(x);
            r[x] = x2;
            merged.push_back(x2);
        }
        return make_m(xform(d->premises[0], r, theta, fresh), lookup(rho, p.var), merged, apply(theta, p.type));
    }
    case Rule::ForallI: {
        auto g = bind(p.eigen);
        TypeMap th = theta;
        th.erase(p.eigen);
        if (g != p.eigen) th[p.eigen] = tvar(g);
        std::string bound = p.bound.empty() || p.bound == p.eigen ? std::string{} : p.bound;
        return make_forall_i(xform(d->premises[0], rho, th, fresh), g, bound);
    }
    case Rule::ForallE: return make_forall_e(xform(d->premises[0], rho, theta, fresh), apply(theta, p.type));
    }
    throw Error("unknown-rule", "unknown rule");
}

bool introduces(const Derivation& d, const std::string& x) {
    const auto& p = d->payload;
    switch (d->rule) {
    case Rule::Ax:
    case Rule::M: return p.var == x;
    case Rule::Sp:
        return std::any_of(p.renaming.begin(), p.renaming.end(), [&](const auto& r) { return r.second == x; });
    default: return false;
    }
}

std::size_t premise_with(const Derivation& d, const std::string& x) {
    for (std::size_t i = 0; i < d->premises.size(); ++i)
        if (d->premises[i]->conclusion.context.count(x)) return i;
    throw Error("substitution-precondition", "variable '" + x + "' lost along the derivation");
}

Derivation subst(const Derivation& d1, const std::string& x, const Derivation& d2, std::size_t r);

// d2 : Δ ⊢ !P : !σ split into its promotion and the m nodes below it.
struct BangShape {
    Derivation inner;                                            // premise of the sp
    std::vector<std::pair<std::string, std::string>> renaming;   // z_j -> w_j
    std::vector<Derivation> suffix;
};

BangShape bang_shape(const Derivation& d2) {
    auto pe = generation_peel(d2);
    for (const auto& n : pe.suffix)
        if (n->rule != Rule::M)
            throw Error("substitution-precondition", "exponential argument derivation has a quantifier below its promotion");
    if (pe.core->rule != Rule::Sp)
        throw Error("substitution-precondition", "exponential argument derivation does not end in a promotion");
    return {pe.core->premises[0], pe.core->payload.renaming, pe.suffix};
}

// One fresh copy of the promoted premise; fills `fresh_of` with z_j -> z'_j.
Derivation inner_copy(const BangShape& s, NameMap& fresh_of) {
    fresh_of.clear();
    for (const auto& [z, w] : s.renaming) fresh_of[z] = fresh_name(base_name(z));
    return xform(s.inner, fresh_of, {}, true);
}

Derivation subst_at_intro(const Derivation& d1, const std::string& x, const Derivation& d2, std::size_t r) {
    if (d1->rule == Rule::Ax) return d2;
    auto shape = bang_shape(d2);
    const auto& ctx_in = shape.inner->conclusion.context;
    if (d1->rule == Rule::M) {
        Derivation cur = d1->premises[0];
        std::vector<NameMap> copies;
        for (const auto& xi : d1->payload.merged) {
            NameMap f;
            auto c = inner_copy(shape, f);
            cur = subst(cur, xi, c, r);
            copies.push_back(std::move(f));
        }
        for (const auto& [z, w] : shape.renaming) {
            std::vector<std::string> merged;
            for (const auto& f : copies) merged.push_back(f.at(z));
            cur = make_m(cur, w, merged, ctx_in.at(z));
        }
        return reapply(shape.suffix, cur);
    }
    // sp: x is the conclusion name of one promoted assumption
    const auto& ren = d1->payload.renaming;
    std::string xk;
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [a, b] : ren) {
        if (b == x) xk = a;
        else out.emplace_back(a, b);
    }
    NameMap f;
    auto c = inner_copy(shape, f);
    Derivation body = subst(d1->premises[0], xk, c, r);
    for (const auto& [z, w] : shape.renaming) out.emplace_back(f.at(z), w);
    return reapply(shape.suffix, make_sp(body, out));
}

Derivation subst(const Derivation& d1, const std::string& x, const Derivation& d2, std::size_t r) {
    if (introduces(d1, x)) return subst_at_intro(d1, x, d2, r);
    auto i = premise_with(d1, x);
    auto prem = d1->premises;
    prem[i] = subst(prem[i], x, d2, r);
    return rebuild(d1, std::move(prem));
}

// Drops ∀I/∀E pairs above `core` by substituting the instance for the
// eigenvariable; m nodes are returned for re-application on the result.
Derivation cancel_quantifiers(const Peeled& pe, std::vector<Derivation>& deferred_m) {
    Derivation core = pe.core;
    std::vector<std::string> stack;
    for (const auto& n : pe.suffix) {
        switch (n->rule) {
        case Rule::ForallI: stack.push_back(n->payload.eigen); break;
        case Rule::ForallE:
            if (stack.empty()) throw Error("subject-reduction-shape", "unmatched instantiation above a redex");
            core = type_substitute_derivation(core, stack.back(), n->payload.type);
            stack.pop_back();
            break;
        case Rule::M: deferred_m.push_back(n); break;
        default: break;
        }
    }
    if (!stack.empty()) throw Error("subject-reduction-shape", "unmatched generalisation above a redex");
    return core;
}

std::pair<Derivation, Derivation> contract(const Derivation& d, RedexKind kind, std::size_t r) {
    auto outer = generation_peel(d);
    const auto& core = outer.core;
    switch (kind) {
    case RedexKind::Beta:
    case RedexKind::BangBeta: {
        if (core->rule != Rule::ImpE) throw Error("subject-reduction-shape", "application redex not typed by impE");
        auto fn = generation_peel(freshen(core->premises[0]));
        std::vector<Derivation> deferred;
        auto lamd = cancel_quantifiers(fn, deferred);
        Rule want = kind == RedexKind::Beta ? Rule::ImpIl : Rule::ImpIe;
        if (lamd->rule != want) throw Error("subject-reduction-shape", "function of a redex not typed by an abstraction");
        auto s = weighted_substitute(lamd->premises[0], lamd->payload.var, core->premises[1], r);
        auto res = reapply(outer.suffix, reapply(deferred, s));
        return {res, res};
    }
    case RedexKind::Proj: {
        if (core->rule != Rule::WithE) throw Error("subject-reduction-shape", "projection not typed by withE");
        std::vector<Derivation> deferred;
        auto pr = cancel_quantifiers(generation_peel(core->premises[0]), deferred);
        if (pr->rule != Rule::WithI || !pr->payload.bare)
            throw Error("subject-reduction-shape", "projected pair not typed by the closed-pair rule");
        auto a = reapply(outer.suffix, reapply(deferred, pr->premises[0]));
        auto b = reapply(outer.suffix, reapply(deferred, pr->premises[1]));
        return {a, b};
    }
    case RedexKind::Copy: {
        if (core->rule != Rule::WithI || core->payload.bare)
            throw Error("subject-reduction-shape", "copy not typed by withI");
        const auto& dn = core->premises[0];
        if (!dn->conclusion.context.empty())
            throw Error("open-copy-scrutinee", "copied value has free variables; it cannot be duplicated");
        auto vsz = size(dn->conclusion.subject);
        auto usz = size(core->premises[3]->conclusion.subject);
        if (usz < vsz)
            throw Error("non-canonical-copy-bound", "bound value of size " + std::to_string(usz) +
                                                        " is smaller than the copied value of size " +
                                                        std::to_string(vsz));
        auto left = weighted_substitute(core->premises[1], core->payload.binder1, dn, r);
        auto right = weighted_substitute(core->premises[2], core->payload.binder2, freshen(dn), r);
        auto res = reapply(outer.suffix, psta::make_pair(left, right));
        return {res, res};
    }
    }
    throw Error("invalid-site", "unknown redex kind");
}

std::pair<Derivation, Derivation> navigate(const Derivation& d, const RedexSite& site, std::size_t pos, std::size_t r) {
    if (pos == site.path.size()) return contract(d, site.kind, r);
    auto down = [&](std::size_t prem) {
        auto [a, b] = navigate(d->premises[prem], site, pos + 1, r);
        auto pa = d->premises, pb = d->premises;
        pa[prem] = a;
        auto ra = rebuild(d, std::move(pa));
        if (a == b) return std::make_pair(ra, ra);
        pb[prem] = b;
        return std::make_pair(ra, rebuild(d, std::move(pb)));
    };
    auto c = static_cast<std::size_t>(site.path[pos]);
    switch (d->rule) {
    case Rule::ForallI:
    case Rule::ForallE:
    case Rule::M: {
        auto [a, b] = navigate(d->premises[0], site, pos, r);
        auto ra = rebuild(d, {a});
        return {ra, a == b ? ra : rebuild(d, {b})};
    }
    case Rule::ImpIl:
    case Rule::ImpIe:
    case Rule::WithE:
        if (c == 0) return down(0);
        break;
    case Rule::ImpE:
        if (c <= 1) return down(c);
        break;
    case Rule::WithI:
        if (d->payload.bare && c <= 1) return down(c);
        if (!d->payload.bare && c >= 1 && c <= 3) return down(c - 1);
        break;
    default: break;
    }
    throw Error("invalid-site", "redex site does not follow the derivation's subject");
}

} // namespace

Derivation freshen(const Derivation& d, const std::map<std::string, std::string>& rename) {
    return xform(d, rename, {}, true);
}

Derivation type_substitute_derivation(const Derivation& d, const std::string& a, const Type& b) {
    return xform(d, {}, {{a, b}}, true);
}

Derivation weighted_substitute(const Derivation& d1, const std::string& x, const Derivation& d2, std::size_t r) {
    const auto& c1 = d1->conclusion.context;
    auto it = c1.find(x);
    if (it == c1.end()) throw Error("substitution-precondition", "'" + x + "' is not assumed by the first derivation");
    if (!type_equal(it->second, d2->conclusion.type))
        throw Error("substitution-precondition", "substituted derivation has the wrong type for '" + x + "'");
    for (const auto& [y, t] : d2->conclusion.context)
        if (y != x && c1.count(y))
            throw Error("substitution-precondition", "contexts overlap on '" + y + "'");
    return subst(freshen(d1), x, freshen(d2), r);
}

std::pair<Derivation, Derivation> subject_reduce(const Derivation& d, const RedexSite& site, std::size_t r) {
    return navigate(d, site, 0, r);
}

} // namespace psta
