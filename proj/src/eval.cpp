#include "psta/eval.hpp"

#include <algorithm>
#include <cstdlib>
#include <memory>
#include <random>
#include <unordered_map>

namespace psta {

std::string rational_string(const Rational& q) {
    return numerator(q).str() + "/" + denominator(q).str();
}

Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(boost::multiprecision::cpp_int(s));
        return Rational(boost::multiprecision::cpp_int(s.substr(0, slash)),
                        boost::multiprecision::cpp_int(s.substr(slash + 1)));
    } catch (const std::exception&) {
        throw Error("bad-rational", "not a rational number: '" + s + "'");
    }
}

bool is_dyadic(const Rational& q) {
    auto d = denominator(q);
    return d > 0 && (d & (d - 1)) == 0;
}

void SurfaceDistribution::add(const Term& t, const Rational& p) {
    auto key = canonical_key(t);
    auto it = mass_.find(key);
    if (it == mass_.end()) mass_.emplace(std::move(key), Entry{t, p});
    else it->second.prob += p;
}

void SurfaceDistribution::add_scaled(const SurfaceDistribution& d, const Rational& factor) {
    for (const auto& [k, e] : d.mass_) {
        auto it = mass_.find(k);
        if (it == mass_.end()) mass_.emplace(k, Entry{e.term, e.prob * factor});
        else it->second.prob += e.prob * factor;
    }
}

Rational SurfaceDistribution::total() const {
    Rational s = 0;
    for (const auto& [k, e] : mass_) s += e.prob;
    return s;
}

Rational SurfaceDistribution::prob_of(const Term& t) const {
    auto it = mass_.find(canonical_key(t));
    return it == mass_.end() ? Rational(0) : it->second.prob;
}

std::string SurfaceDistribution::fingerprint() const {
    std::string out;
    for (const auto& [k, e] : mass_) {
        out += k;
        out += '=';
        out += rational_string(e.prob);
        out += '\n';
    }
    return out;
}

bool SurfaceDistribution::operator==(const SurfaceDistribution& o) const {
    if (mass_.size() != o.mass_.size()) return false;
    for (auto a = mass_.begin(), b = o.mass_.begin(); a != mass_.end(); ++a, ++b)
        if (a->first != b->first || a->second.prob != b->second.prob) return false;
    return true;
}

Strategy Strategy::parse(const std::string& text) {
    if (text == "lo" || text == "leftmost" || text == "leftmost-outermost") return leftmost();
    if (text == "ri" || text == "rightmost" || text == "rightmost-innermost") return rightmost();
    auto arg = [&](const std::string& prefix) -> std::optional<std::uint64_t> {
        if (text.rfind(prefix, 0) != 0) return std::nullopt;
        try {
            return std::stoull(text.substr(prefix.size()));
        } catch (const std::exception&) {
            throw Error("bad-strategy", "malformed strategy '" + text + "'");
        }
    };
    if (auto s = arg("random:")) return random(*s);
    if (auto k = arg("site:")) return site(static_cast<std::size_t>(*k));
    throw Error("bad-strategy",
                "unknown strategy '" + text + "' (expected lo, ri, random:<seed>, site:<k>)");
}

std::string Strategy::name() const {
    switch (kind) {
    case Kind::LeftmostOutermost: return "leftmost-outermost";
    case Kind::RightmostInnermost: return "rightmost-innermost";
    case Kind::Random: return "random:" + std::to_string(seed);
    case Kind::SiteIndex: return "site:" + std::to_string(index);
    }
    return "?";
}

std::vector<Strategy> standard_strategies() {
    return {Strategy::leftmost(), Strategy::rightmost(), Strategy::random(7), Strategy::site(1)};
}

std::size_t default_fuel() {
    if (const char* env = std::getenv("PSTA_FUEL")) {
        try {
            auto v = std::stoull(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
    }
    return 1000000;
}

FuelExhausted::FuelExhausted(std::size_t f, Term front, std::size_t total)
    : Error("fuel-exhausted", "fuel exhausted after " + std::to_string(f) + " steps on one branch"),
      fuel(f), frontier(std::move(front)), steps_total(total) {}

namespace {

struct Evaluator {
    using DistPtr = std::shared_ptr<const SurfaceDistribution>;
    struct Result {
        DistPtr dist;
        std::size_t depth;
    };

    Strategy strategy;
    std::size_t fuel;
    bool memo;
    std::mt19937_64 rng;
    std::size_t steps_total = 0;
    std::size_t max_path = 0;
    std::unordered_map<std::string, Result> table;

    const RedexSite& choose(const std::vector<RedexSite>& rs) {
        switch (strategy.kind) {
        case Strategy::Kind::LeftmostOutermost: return rs.front();
        case Strategy::Kind::RightmostInnermost: return rs.back();
        case Strategy::Kind::Random: {
            std::uniform_int_distribution<std::size_t> pick(0, rs.size() - 1);
            return rs[pick(rng)];
        }
        case Strategy::Kind::SiteIndex: return rs[strategy.index % rs.size()];
        }
        return rs.front();
    }

    std::optional<RedexSite> next_site(const Term& t) {
        if (strategy.kind == Strategy::Kind::LeftmostOutermost) return first_redex(t);
        auto rs = find_redexes(t);
        if (rs.empty()) return std::nullopt;
        return choose(rs);
    }

    // Evaluates t, reached after `base` steps on the current path. With memo,
    // results are keyed at the start of each deterministic stretch and at the
    // split that ends it.
    Result run(Term t, std::size_t base) {
        std::vector<std::pair<std::string, std::size_t>> chain; // (key, steps into the stretch)
        std::size_t n = 0;
        auto finish = [&](Result r) {
            // r.depth is measured from the end of the stretch
            for (const auto& [key, at] : chain) table.emplace(key, Result{r.dist, r.depth + (n - at)});
            return Result{r.dist, r.depth + n};
        };
        auto lookup = [&]() -> std::optional<Result> {
            auto key = canonical_key(t);
            auto hit = table.find(key);
            if (hit != table.end()) {
                max_path = std::max(max_path, base + n + hit->second.depth);
                return finish(hit->second);
            }
            chain.emplace_back(std::move(key), n);
            return std::nullopt;
        };
        if (memo)
            if (auto r = lookup()) return *r;
        for (;;) {
            auto site = next_site(t);
            if (!site) {
                auto d = std::make_shared<SurfaceDistribution>();
                d->add(t, 1);
                max_path = std::max(max_path, base + n);
                return finish({d, 0});
            }
            if (base + n >= fuel) throw FuelExhausted(fuel, t, steps_total);
            if (memo && site->kind == RedexKind::Proj && (chain.empty() || chain.back().second != n))
                if (auto r = lookup()) return *r;
            auto res = step(t, *site);
            ++steps_total;
            ++n;
            if (res.successors.size() == 1) {
                t = std::move(res.successors[0]);
                continue;
            }
            Result a = run(res.successors[0], base + n);
            Result b = run(res.successors[1], base + n);
            auto d = std::make_shared<SurfaceDistribution>();
            d->add_scaled(*a.dist, Rational(1, 2));
            d->add_scaled(*b.dist, Rational(1, 2));
            // the split step itself is counted in n
            --n;
            return finish({d, std::max(a.depth, b.depth) + 1});
        }
    }
};

} // namespace

EvalReport evaluate(const Term& t, const EvalOptions& opts) {
    Evaluator ev;
    ev.strategy = opts.strategy;
    ev.fuel = opts.fuel ? opts.fuel : default_fuel();
    ev.memo = opts.memo;
    ev.rng.seed(opts.strategy.seed);
    auto r = ev.run(t, 0);
    EvalReport rep;
    rep.distribution = *r.dist;
    rep.branch_depth = r.depth;
    rep.steps_total = ev.steps_total;
    rep.fuel_used = std::max(ev.max_path, r.depth);
    return rep;
}

namespace {

struct Truncated {};

struct Explorer {
    using Set = std::vector<std::shared_ptr<const SurfaceDistribution>>;
    std::size_t fuel, limit;
    std::size_t max_set = 64;
    std::unordered_map<std::string, Set> table;

    static void insert(Set& s, std::shared_ptr<const SurfaceDistribution> d) {
        for (const auto& e : s)
            if (*e == *d) return;
        s.push_back(std::move(d));
    }

    const Set& explore(const Term& t, std::size_t depth) {
        auto key = canonical_key(t);
        auto hit = table.find(key);
        if (hit != table.end()) return hit->second;
        if (depth > fuel || table.size() >= limit) throw Truncated{};
        Set out;
        auto rs = find_redexes(t);
        if (rs.empty()) {
            auto d = std::make_shared<SurfaceDistribution>();
            d->add(t, 1);
            out.push_back(d);
        }
        for (const auto& site : rs) {
            auto res = step(t, site);
            if (res.successors.size() == 1) {
                Set sub = explore(res.successors[0], depth + 1);
                for (const auto& d : sub) insert(out, d);
            } else {
                Set a = explore(res.successors[0], depth + 1);
                Set b = explore(res.successors[1], depth + 1);
                for (const auto& x : a)
                    for (const auto& y : b) {
                        auto d = std::make_shared<SurfaceDistribution>();
                        d->add_scaled(*x, Rational(1, 2));
                        d->add_scaled(*y, Rational(1, 2));
                        insert(out, d);
                        if (out.size() > max_set) throw Truncated{};
                    }
            }
        }
        return table.emplace(std::move(key), std::move(out)).first->second;
    }
};

} // namespace

ConfluenceReport confluence_oracle(const Term& t, std::size_t fuel, std::size_t branch_limit) {
    Explorer ex;
    ex.fuel = fuel;
    ex.limit = branch_limit;
    ConfluenceReport rep;
    try {
        const auto& s = ex.explore(t, 0);
        for (const auto& d : s) rep.distributions.push_back(*d);
        rep.agree = rep.distributions.size() == 1;
    } catch (const Truncated&) {
        rep.complete = false;
        rep.agree = false;
    }
    rep.states = ex.table.size();
    return rep;
}

} // namespace psta
