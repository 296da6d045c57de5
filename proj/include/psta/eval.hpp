#pragma once

#include "psta/error.hpp"
#include "psta/reduction.hpp"
#include "psta/term.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace psta {

using Rational = boost::multiprecision::cpp_rational;

std::string rational_string(const Rational& q); // always "num/den"
Rational parse_rational(const std::string& s);
bool is_dyadic(const Rational& q);

// Exact mass over α-classes of surface normal forms.
class SurfaceDistribution {
public:
    struct Entry {
        Term term;
        Rational prob;
    };

    void add(const Term& t, const Rational& p);
    void add_scaled(const SurfaceDistribution& d, const Rational& factor);

    Rational total() const;
    Rational prob_of(const Term& t) const;
    std::size_t support_size() const { return mass_.size(); }
    const std::map<std::string, Entry>& entries() const { return mass_; }

    // canonical text used for set-of-distribution comparisons
    std::string fingerprint() const;

    bool operator==(const SurfaceDistribution& o) const;

private:
    std::map<std::string, Entry> mass_; // keyed by canonical_key
};

struct Strategy {
    enum class Kind { LeftmostOutermost, RightmostInnermost, Random, SiteIndex };
    Kind kind = Kind::LeftmostOutermost;
    std::uint64_t seed = 0;
    std::size_t index = 0;

    static Strategy leftmost() { return {}; }
    static Strategy rightmost() { return {Kind::RightmostInnermost, 0, 0}; }
    static Strategy random(std::uint64_t seed) { return {Kind::Random, seed, 0}; }
    static Strategy site(std::size_t k) { return {Kind::SiteIndex, 0, k}; }

    static Strategy parse(const std::string& text);
    std::string name() const;
};

std::vector<Strategy> standard_strategies();

std::size_t default_fuel(); // 10^6, or $PSTA_FUEL

struct EvalOptions {
    Strategy strategy;
    std::size_t fuel = 0; // 0 = default_fuel()
    bool memo = false;
};

struct EvalReport {
    SurfaceDistribution distribution;
    std::size_t branch_depth = 0; // |π|: longest chain of steps on any path
    std::size_t steps_total = 0;
    std::size_t fuel_used = 0;
};

class FuelExhausted : public Error {
public:
    FuelExhausted(std::size_t fuel, Term frontier, std::size_t steps_total);
    std::size_t fuel;
    Term frontier; // the branch that ran out
    std::size_t steps_total;
};

EvalReport evaluate(const Term& t, const EvalOptions& opts = {});

struct ConfluenceReport {
    bool agree = true;
    bool complete = true; // false: exploration truncated, result inconclusive
    std::vector<SurfaceDistribution> distributions;
    std::size_t states = 0;
};

ConfluenceReport confluence_oracle(const Term& t, std::size_t fuel = 10000, std::size_t branch_limit = 200000);

} // namespace psta
