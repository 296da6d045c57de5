#include "psta/generate.hpp"

#include "psta/assign.hpp"

#include <random>
#include <set>

namespace psta {

namespace {

enum class Goal { Unit, Bool, Pair };

struct Gen {
    std::mt19937_64 rng;
    std::size_t max_depth;

    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

    Sugared x_der() {
        auto x = fresh_name("x");
        return sg::bang_lam(x, sg::der(sg::var(x)));
    }

    Sugared id() {
        auto x = fresh_name("x");
        return sg::lam(x, sg::var(x));
    }

    Sugared go(Goal g, std::size_t depth) {
        bool leaf = depth >= max_depth || pick(3) == 0;
        switch (g) {
        case Goal::Unit:
            if (leaf) return sg::unit();
            switch (pick(6)) {
            case 0: return sg::app(id(), go(Goal::Unit, depth + 1));
            case 1: return sg::proj(sg::pair(go(Goal::Unit, depth + 1), go(Goal::Unit, depth + 1)));
            case 2: return sg::app(x_der(), sg::bang(go(Goal::Unit, depth + 1)));
            case 3: return sg::let_unit(go(Goal::Unit, depth + 1), go(Goal::Unit, depth + 1));
            case 4: {
                auto a = fresh_name("x"), b = fresh_name("y");
                return sg::proj(sg::copy(sg::unit(), sg::annot(go(Goal::Unit, depth + 1), unit_type()), a, b, sg::var(a),
                                         sg::var(b)));
            }
            default: {
                // duplication through a box
                auto x = fresh_name("x");
                auto dup = sg::annot(sg::bang_lam(x, sg::app(sg::der(sg::var(x)), sg::der(sg::var(x)))),
                                     imp(tbang(unit_type()), unit_type()));
                return sg::app(dup, sg::bang(go(Goal::Unit, depth + 1)));
            }
            }
        case Goal::Bool:
            if (leaf) return enc::boolean(static_cast<int>(pick(2)));
            switch (pick(5)) {
            case 0: return sg::proj(sg::pair(go(Goal::Bool, depth + 1), go(Goal::Bool, depth + 1)));
            case 1: return sg::app(id(), go(Goal::Bool, depth + 1));
            case 2: return sg::app(x_der(), sg::bang(go(Goal::Bool, depth + 1)));
            case 3: return sg::let_unit(go(Goal::Unit, depth + 1), go(Goal::Bool, depth + 1));
            default: return sg::app(go(Goal::Unit, depth + 1), go(Goal::Bool, depth + 1));
            }
        case Goal::Pair:
            switch (pick(3)) {
            case 0: return sg::tensor({go(Goal::Bool, depth + 1), go(Goal::Bool, depth + 1)});
            case 1: {
                auto x = fresh_name("x");
                return sg::app(sg::bang_lam(x, sg::tensor({sg::der(sg::var(x)), sg::der(sg::var(x))})),
                               sg::bang(go(Goal::Bool, depth + 1)));
            }
            default: return sg::app(go(Goal::Unit, depth + 1), go(Goal::Pair, depth + 1));
            }
        }
        return sg::unit();
    }
};

std::size_t count_proj(const Term& t) {
    std::size_t n = t->kind == TermKind::Proj ? 1 : 0;
    for (const auto& k : t->kids) n += count_proj(k);
    return n;
}

// terms of exactly size n using every name in scope exactly once
void values_of(std::size_t n, const std::vector<std::string>& scope, std::size_t& next, std::vector<Term>& out) {
    if (n == 1) {
        if (scope.size() == 1) out.push_back(var(scope[0]));
        return;
    }
    {
        std::string x = "v" + std::to_string(next++);
        auto inner = scope;
        inner.push_back(x);
        std::vector<Term> bodies;
        values_of(n - 1, inner, next, bodies);
        for (auto& b : bodies) out.push_back(lam(x, b));
    }
    if (n < 3) return;
    const std::size_t k = scope.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        std::vector<std::string> left, right;
        for (std::size_t i = 0; i < k; ++i) (mask >> i & 1 ? left : right).push_back(scope[i]);
        for (std::size_t n1 = 1; n1 + 2 <= n; ++n1) {
            std::size_t n2 = n - 1 - n1;
            std::vector<Term> ls, rs;
            values_of(n1, left, next, ls);
            if (ls.empty()) continue;
            values_of(n2, right, next, rs);
            for (auto& l : ls)
                for (auto& r : rs) {
                    if (l->kind != TermKind::Lam) out.push_back(app(l, r));
                    out.push_back(pair(l, r));
                }
        }
    }
}

} // namespace

std::vector<Term> closed_values(std::size_t max_size) {
    std::vector<Term> out;
    std::set<std::string> seen;
    std::size_t next = 0;
    for (std::size_t n = 1; n <= max_size; ++n) {
        std::vector<Term> ts;
        values_of(n, {}, next, ts);
        for (auto& t : ts)
            if (is_value(t) && is_s_linear(t) && seen.insert(canonical_key(t)).second) out.push_back(t);
    }
    return out;
}

std::vector<Built> value_inhabitants(const Type& type, std::size_t max_size) {
    std::vector<Built> out;
    for (const auto& v : closed_values(max_size)) {
        try {
            Built b;
            b.term = v;
            b.type = type;
            b.derivation = assign(v, type);
            b.source = sg::embed(v);
            out.push_back(std::move(b));
        } catch (const Error&) {
        }
    }
    return out;
}

std::vector<Built> generate_typed(std::size_t count, std::uint64_t seed, const GenOptions& opts) {
    Gen g{std::mt19937_64(seed), opts.max_depth};
    std::vector<Built> out;
    std::set<std::string> seen;
    const Type goals[] = {unit_type(), bool_type(), tensor_type({bool_type(), bool_type()})};
    for (std::size_t attempts = 0; out.size() < count; ++attempts) {
        if (attempts > count * 200) throw Error("generator-exhausted", "could not find enough distinct typable terms");
        auto which = g.pick(3);
        auto s = g.go(static_cast<Goal>(which), 0);
        auto e = elaborate(s);
        if (size(e.term) > opts.max_size || count_proj(e.term) > opts.max_proj) continue;
        if (!seen.insert(canonical_key(e.term)).second) continue;
        try {
            out.push_back(typed(s, goals[which]));
        } catch (const Error&) {
            seen.erase(canonical_key(e.term));
        }
    }
    return out;
}

} // namespace psta
