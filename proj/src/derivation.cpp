#include "psta/derivation.hpp"

#include <algorithm>
#include <set>

namespace psta {

const char* to_string(Rule r) {
    switch (r) {
    case Rule::Ax: return "ax";
    case Rule::ImpIl: return "impIl";
    case Rule::ImpIe: return "impIe";
    case Rule::ImpE: return "impE";
    case Rule::WithI: return "withI";
    case Rule::WithE: return "withE";
    case Rule::Sp: return "sp";
    case Rule::M: return "m";
    case Rule::ForallI: return "forallI";
    case Rule::ForallE: return "forallE";
    }
    return "?";
}

Rule rule_from_string(const std::string& s) {
    static const std::map<std::string, Rule> names = {
        {"ax", Rule::Ax},       {"impIl", Rule::ImpIl}, {"impIe", Rule::ImpIe},     {"impE", Rule::ImpE},
        {"withI", Rule::WithI}, {"withE", Rule::WithE}, {"sp", Rule::Sp},           {"m", Rule::M},
        {"forallI", Rule::ForallI}, {"forallE", Rule::ForallE}};
    auto it = names.find(s);
    if (it == names.end()) throw Error("unknown-rule", "unknown rule tag '" + s + "'");
    return it->second;
}

namespace {

[[noreturn]] void fail(const std::string& code, const std::string& msg) { throw CheckError(code, "", msg); }

void arity(const std::vector<Derivation>& p, std::size_t n, Rule r) {
    if (p.size() != n)
        fail("arity", std::string(to_string(r)) + " expects " + std::to_string(n) + " premises, got " +
                          std::to_string(p.size()));
}

void require_wf(const Type& t, const char* what) {
    if (!t) fail("missing-type", std::string(what) + " type is missing");
    if (has_meta(t)) fail("ill-formed-type", std::string(what) + " type contains an unresolved placeholder");
    if (!is_well_formed(t)) fail("ill-formed-type", std::string(what) + " type violates the type grammar");
}

bool context_lazy(const Context& c) {
    for (const auto& [x, t] : c)
        if (!is_forall_bang_lazy(t)) return false;
    return true;
}

Judgment infer(Rule rule, const Payload& p, const std::vector<Derivation>& prem) {
    Judgment j;
    switch (rule) {
    case Rule::Ax: {
        arity(prem, 0, rule);
        require_wf(p.type, "axiom");
        if (!is_linear(p.type)) fail("ax-banged-type", "axiom at a strictly exponential type");
        if (p.var.empty()) fail("ax-missing-variable", "axiom without a variable");
        j.context = {{p.var, p.type}};
        j.subject = var(p.var);
        j.type = p.type;
        return j;
    }
    case Rule::ImpIl:
    case Rule::ImpIe: {
        arity(prem, 1, rule);
        const auto& c = prem[0]->conclusion;
        auto it = c.context.find(p.var);
        if (it == c.context.end()) fail("impI-missing-binder", "binder '" + p.var + "' is not in the premise context");
        const Type& a = it->second;
        if (rule == Rule::ImpIl && !is_linear(a))
            fail("impIl-antecedent-not-linear", "linear abstraction over a strictly exponential assumption");
        if (rule == Rule::ImpIe && is_linear(a))
            fail("impIe-antecedent-not-exponential", "bang abstraction over a linear assumption");
        if (!is_linear(c.type)) fail("imp-consequent-banged", "implication with a strictly exponential consequent");
        j.context = c.context;
        j.context.erase(p.var);
        j.subject = rule == Rule::ImpIl ? lam(p.var, c.subject) : bang_lam(p.var, c.subject);
        j.type = imp(a, c.type);
        return j;
    }
    case Rule::ImpE: {
        arity(prem, 2, rule);
        const auto& f = prem[0]->conclusion;
        const auto& a = prem[1]->conclusion;
        if (f.type->kind != TypeKind::Imp) fail("impE-not-implication", "function premise is not an implication");
        if (!type_equal(f.type->kids[0], a.type))
            fail("impE-argument-type-mismatch", "argument type differs from the antecedent");
        j.context = f.context;
        for (const auto& [x, t] : a.context)
            if (!j.context.emplace(x, t).second) fail("impE-context-overlap", "variable '" + x + "' in both premises");
        j.subject = app(f.subject, a.subject);
        j.type = f.type->kids[1];
        return j;
    }
    case Rule::WithI: {
        if (p.bare) {
            arity(prem, 2, rule);
            const auto& l = prem[0]->conclusion;
            const auto& r = prem[1]->conclusion;
            if (!l.context.empty() || !r.context.empty())
                fail("withI-pair-context", "pair components must be closed");
            if (!is_forall_bang_lazy(l.type)) fail("withI-not-lazy-C1", "left component type is not ∀!-lazy");
            if (!is_forall_bang_lazy(r.type)) fail("withI-not-lazy-C2", "right component type is not ∀!-lazy");
            j.subject = pair(l.subject, r.subject);
            j.type = with(l.type, r.type);
            return j;
        }
        arity(prem, 4, rule);
        const auto& n = prem[0]->conclusion;
        const auto& m1 = prem[1]->conclusion;
        const auto& m2 = prem[2]->conclusion;
        const auto& v = prem[3]->conclusion;
        const Type& c = n.type;
        if (!is_forall_bang_lazy(c)) fail("withI-not-lazy-C", "copied type C is not ∀!-lazy");
        if (!context_lazy(n.context)) fail("withI-context-not-lazy", "context of the copied term is not ∀!-lazy");
        auto branch_ok = [&](const Judgment& b, const std::string& x) {
            return b.context.size() == 1 && b.context.begin()->first == x && type_equal(b.context.begin()->second, c);
        };
        if (p.binder1.empty() || p.binder2.empty()) fail("withI-missing-binder", "copy binders missing");
        if (!branch_ok(m1, p.binder1)) fail("withI-branch-context", "left branch context must be exactly " + p.binder1 + ":C");
        if (!branch_ok(m2, p.binder2)) fail("withI-branch-context", "right branch context must be exactly " + p.binder2 + ":C");
        if (!v.context.empty()) fail("withI-value-context", "bound value must be closed");
        if (!type_equal(v.type, c)) fail("withI-value-type-mismatch", "bound value is not typed at C");
        if (!is_value(v.subject)) fail("withI-non-value", "bound term is not a value");
        if (!is_forall_bang_lazy(m1.type)) fail("withI-not-lazy-C1", "left branch type is not ∀!-lazy");
        if (!is_forall_bang_lazy(m2.type)) fail("withI-not-lazy-C2", "right branch type is not ∀!-lazy");
        j.context = n.context;
        j.subject = copy(v.subject, n.subject, p.binder1, p.binder2, m1.subject, m2.subject);
        j.type = with(m1.type, m2.type);
        return j;
    }
    case Rule::WithE: {
        arity(prem, 1, rule);
        const auto& c = prem[0]->conclusion;
        if (c.type->kind != TypeKind::With) fail("withE-not-with", "premise type is not C & C");
        if (!type_equal(c.type->kids[0], c.type->kids[1]))
            fail("withE-components-differ", "premise type is C1 & C2 with C1 != C2");
        if (!is_forall_bang_lazy(c.type->kids[0])) fail("withE-not-lazy", "projected type is not ∀!-lazy");
        if (!context_lazy(c.context)) fail("withE-context-not-lazy", "context is not ∀!-lazy");
        j.context = c.context;
        j.subject = proj(c.subject);
        j.type = c.type->kids[0];
        return j;
    }
    case Rule::Sp: {
        arity(prem, 1, rule);
        const auto& c = prem[0]->conclusion;
        std::set<std::string> sources, targets;
        std::map<std::string, Term> sigma;
        for (const auto& [x, y] : p.renaming) {
            if (!sources.insert(x).second) fail("sp-duplicate-source", "variable '" + x + "' renamed twice");
            if (!targets.insert(y).second) fail("sp-duplicate-target", "two assumptions renamed to '" + y + "'");
            auto it = c.context.find(x);
            if (it == c.context.end()) fail("sp-context-mismatch", "'" + x + "' is not in the premise context");
            j.context.emplace(y, tbang(it->second));
            sigma.emplace(x, der(var(y)));
        }
        if (sources.size() != c.context.size())
            fail("sp-context-mismatch", "every premise assumption must be promoted");
        j.subject = bang(substitute_many(c.subject, sigma));
        j.type = tbang(c.type);
        return j;
    }
    case Rule::M: {
        arity(prem, 1, rule);
        const auto& c = prem[0]->conclusion;
        require_wf(p.type, "m");
        j.context = c.context;
        std::map<std::string, Term> sigma;
        for (const auto& xi : p.merged) {
            auto it = j.context.find(xi);
            if (it == j.context.end()) {
                if (sigma.count(xi)) fail("m-duplicate", "'" + xi + "' merged twice");
                fail("m-missing-assumption", "'" + xi + "' is not in the premise context");
            }
            if (!type_equal(it->second, p.type)) fail("m-type-mismatch", "'" + xi + "' does not have the merged type");
            j.context.erase(it);
            sigma.emplace(xi, der(var(p.var)));
        }
        if (p.var.empty()) fail("m-missing-variable", "m without a conclusion variable");
        if (!j.context.emplace(p.var, tbang(p.type)).second)
            fail("m-name-clash", "'" + p.var + "' already occurs in the context");
        j.subject = sigma.empty() ? c.subject : substitute_many(c.subject, sigma);
        j.type = c.type;
        return j;
    }
    case Rule::ForallI: {
        arity(prem, 1, rule);
        const auto& c = prem[0]->conclusion;
        if (p.eigen.empty()) fail("forallI-missing-eigenvariable", "no eigenvariable recorded");
        for (const auto& [x, t] : c.context)
            if (type_free_vars(t).count(p.eigen))
                fail("forallI-freshness", "eigenvariable '" + p.eigen + "' is free in the context ('" + x + "')");
        if (!is_linear(c.type)) fail("forallI-banged-body", "quantifier over a strictly exponential type");
        std::string a = p.bound.empty() ? p.eigen : p.bound;
        Type body = c.type;
        if (a != p.eigen) {
            if (type_free_vars(body).count(a)) fail("forallI-bound-clash", "binder '" + a + "' would be captured");
            body = type_substitute(body, p.eigen, tvar(a));
        }
        j.context = c.context;
        j.subject = c.subject;
        j.type = forall(a, body);
        return j;
    }
    case Rule::ForallE: {
        arity(prem, 1, rule);
        const auto& c = prem[0]->conclusion;
        if (c.type->kind != TypeKind::Forall) fail("forallE-not-forall", "premise type is not quantified");
        require_wf(p.type, "instance");
        if (!is_linear(p.type)) fail("forallE-banged-instance", "instance type must be linear");
        j.context = c.context;
        j.subject = c.subject;
        j.type = type_substitute(c.type->kids[0], c.type->name, p.type);
        return j;
    }
    }
    fail("unknown-rule", "unknown rule");
}

Derivation node(Rule r, Payload p, std::vector<Derivation> prem) {
    auto n = std::make_shared<DerivationNode>();
    n->conclusion = infer(r, p, prem);
    n->rule = r;
    n->payload = std::move(p);
    n->premises = std::move(prem);
    return n;
}

} // namespace

Derivation make_ax(const std::string& x, const Type& a) {
    Payload p;
    p.var = x;
    p.type = a;
    return node(Rule::Ax, std::move(p), {});
}

Derivation make_imp_il(const Derivation& d, const std::string& x) {
    Payload p;
    p.var = x;
    return node(Rule::ImpIl, std::move(p), {d});
}

Derivation make_imp_ie(const Derivation& d, const std::string& x) {
    Payload p;
    p.var = x;
    return node(Rule::ImpIe, std::move(p), {d});
}

Derivation make_imp_e(const Derivation& f, const Derivation& a) { return node(Rule::ImpE, {}, {f, a}); }

Derivation make_with_i(const Derivation& n, const Derivation& m1, const Derivation& m2, const Derivation& v,
                       const std::string& x1, const std::string& x2) {
    Payload p;
    p.binder1 = x1;
    p.binder2 = x2;
    return node(Rule::WithI, std::move(p), {n, m1, m2, v});
}

Derivation make_pair(const Derivation& m1, const Derivation& m2) {
    Payload p;
    p.bare = true;
    return node(Rule::WithI, std::move(p), {m1, m2});
}

Derivation make_with_e(const Derivation& d) { return node(Rule::WithE, {}, {d}); }

Derivation make_sp(const Derivation& d, const std::vector<std::pair<std::string, std::string>>& renaming) {
    Payload p;
    p.renaming = renaming;
    return node(Rule::Sp, std::move(p), {d});
}

Derivation make_m(const Derivation& d, const std::string& x, const std::vector<std::string>& merged, const Type& sigma) {
    Payload p;
    p.var = x;
    p.merged = merged;
    p.type = sigma;
    return node(Rule::M, std::move(p), {d});
}

Derivation make_forall_i(const Derivation& d, const std::string& eigen, const std::string& bound) {
    Payload p;
    p.eigen = eigen;
    p.bound = bound;
    return node(Rule::ForallI, std::move(p), {d});
}

Derivation make_forall_e(const Derivation& d, const Type& instance) {
    Payload p;
    p.type = instance;
    return node(Rule::ForallE, std::move(p), {d});
}

Derivation rebuild(const Derivation& n, std::vector<Derivation> premises) {
    return node(n->rule, n->payload, std::move(premises));
}

Derivation make_raw(Rule rule, Payload payload, std::vector<Derivation> premises, Judgment conclusion) {
    auto n = std::make_shared<DerivationNode>();
    n->rule = rule;
    n->payload = std::move(payload);
    n->premises = std::move(premises);
    n->conclusion = std::move(conclusion);
    return n;
}

namespace {

void check_rec(const Derivation& d, const std::string& path) {
    if (!d) throw CheckError("missing-node", path, "missing derivation node");
    for (std::size_t i = 0; i < d->premises.size(); ++i)
        check_rec(d->premises[i], path + ".premises[" + std::to_string(i) + "]");
    Judgment expect;
    try {
        expect = infer(d->rule, d->payload, d->premises);
    } catch (const CheckError& e) {
        throw CheckError(e.code(), path, std::string(to_string(d->rule)) + ": " + std::string(e.what()).substr(2));
    }
    const auto& got = d->conclusion;
    if (!got.subject || !got.type) throw CheckError("conclusion-incomplete", path, "stored conclusion is incomplete");
    if (!alpha_equal(expect.subject, got.subject))
        throw CheckError("conclusion-subject-mismatch", path,
                         std::string(to_string(d->rule)) + ": stored subject differs from the rule's conclusion");
    if (!type_equal(expect.type, got.type))
        throw CheckError("conclusion-type-mismatch", path,
                         std::string(to_string(d->rule)) + ": stored type differs from the rule's conclusion");
    bool same_ctx = expect.context.size() == got.context.size();
    for (auto a = expect.context.cbegin(), b = got.context.cbegin(); same_ctx && a != expect.context.end(); ++a, ++b)
        same_ctx = a->first == b->first && type_equal(a->second, b->second);
    if (!same_ctx)
        throw CheckError("conclusion-context-mismatch", path,
                         std::string(to_string(d->rule)) + ": stored context differs from the rule's conclusion");
}

} // namespace

Judgment check_derivation(const Derivation& d) {
    check_rec(d, "$");
    return d->conclusion;
}

std::size_t local_rank(const DerivationNode& n) {
    std::size_t k = 0;
    if (n.rule == Rule::M) {
        for (const auto& x : n.payload.merged)
            if (occurs_free(n.premises[0]->conclusion.subject, x)) ++k;
    } else if (n.rule == Rule::Sp) {
        for (const auto& [x, y] : n.payload.renaming)
            if (occurs_free(n.premises[0]->conclusion.subject, x)) ++k;
    }
    return k;
}

std::size_t rank(const Derivation& d) {
    std::size_t r = 1;
    if (d->rule == Rule::M) r = std::max(r, local_rank(*d));
    for (const auto& p : d->premises) r = std::max(r, rank(p));
    return r;
}

std::size_t depth(const Derivation& d) {
    std::size_t m = 0;
    for (const auto& p : d->premises) m = std::max(m, depth(p));
    return m + (d->rule == Rule::Sp ? 1 : 0);
}

boost::multiprecision::cpp_int weight(const Derivation& d, std::size_t r) {
    using boost::multiprecision::cpp_int;
    std::vector<cpp_int> w;
    for (const auto& p : d->premises) w.push_back(weight(p, r));
    cpp_int sum = 0;
    for (const auto& x : w) sum += x;
    switch (d->rule) {
    case Rule::Ax: return 1;
    case Rule::ImpIl:
    case Rule::ImpIe:
    case Rule::WithE: return sum + 1;
    case Rule::ImpE: return sum + 1;
    case Rule::WithI: return sum + (d->payload.bare ? 1 : 2);
    case Rule::Sp: return cpp_int(r) * (sum + local_rank(*d)) + 1;
    case Rule::M: return sum + local_rank(*d);
    case Rule::ForallI:
    case Rule::ForallE: return sum;
    }
    return sum;
}

Metrics metrics(const Derivation& d, std::size_t r) { return {rank(d), depth(d), weight(d, r)}; }

std::size_t node_count(const Derivation& d) {
    std::size_t n = 1;
    for (const auto& p : d->premises) n += node_count(p);
    return n;
}

Peeled generation_peel(const Derivation& d) {
    Peeled out;
    Derivation cur = d;
    while (cur->rule == Rule::ForallI || cur->rule == Rule::ForallE || cur->rule == Rule::M) {
        out.suffix.push_back(cur);
        cur = cur->premises[0];
    }
    std::reverse(out.suffix.begin(), out.suffix.end());
    out.core = cur;
    return out;
}

Derivation reapply(const std::vector<Derivation>& suffix, Derivation core) {
    for (const auto& n : suffix) core = rebuild(n, {core});
    return core;
}

void collect_bounds(const Derivation& d, std::vector<ValueBound>& out) {
    if (d->rule == Rule::WithI && !d->payload.bare) {
        const auto& v = d->premises[3]->conclusion;
        out.push_back({size(v.subject), type_size(v.type)});
    }
    for (const auto& p : d->premises) collect_bounds(p, out);
}

std::vector<ValueBound> with_value_bounds(const Derivation& d) {
    std::vector<ValueBound> out;
    collect_bounds(d, out);
    return out;
}

} // namespace psta
