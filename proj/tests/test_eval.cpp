#include "psta/eval.hpp"
#include "psta/reduction.hpp"
#include "psta/syntax.hpp"

#include <gtest/gtest.h>

#include <cstdlib>

using namespace psta;

namespace {

Term raw(const std::string& s) { return parse_term(s, false).term; }

const char* kCoin = "proj(<\\x.\\y.x, \\x.\\y.y>)";
const char* kOmega = "(\\!x. d(x) !d(x)) !(\\!x. d(x) !d(x))";

// Reference: always fire the last surface redex found, weight each proj
// outcome by 1/2, no sharing.
void naive(const Term& t, const Rational& p, std::map<std::string, std::pair<Term, Rational>>& out, int budget) {
    ASSERT_GT(budget, 0);
    auto sites = find_redexes(t);
    if (sites.empty()) {
        auto& e = out[canonical_key(t)];
        e.first = t;
        e.second += p;
        return;
    }
    auto s = step(t, sites.back());
    Rational q = s.successors.size() == 2 ? p / 2 : p;
    for (const auto& n : s.successors) naive(n, q, out, budget - 1);
}

void expect_matches_naive(const Term& t, const SurfaceDistribution& d) {
    std::map<std::string, std::pair<Term, Rational>> ref;
    naive(t, Rational(1), ref, 200);
    EXPECT_EQ(ref.size(), d.support_size());
    for (const auto& [k, e] : ref) EXPECT_EQ(d.prob_of(e.first), e.second) << print_term(e.first);
}

} // namespace

TEST(Rationals, Formatting) {
    EXPECT_EQ(rational_string(Rational(1, 2)), "1/2");
    EXPECT_EQ(rational_string(Rational(1)), "1/1");
    EXPECT_EQ(parse_rational("3/4"), Rational(3, 4));
    EXPECT_TRUE(is_dyadic(Rational(3, 8)));
    EXPECT_FALSE(is_dyadic(Rational(1, 3)));
}

TEST(Eval, CoinIsFair) {
    auto r = evaluate(raw(kCoin));
    EXPECT_EQ(r.distribution.support_size(), 2u);
    EXPECT_EQ(r.distribution.prob_of(raw("\\x.\\y.x")), Rational(1, 2));
    EXPECT_EQ(r.distribution.prob_of(raw("\\x.\\y.y")), Rational(1, 2));
    EXPECT_EQ(r.distribution.total(), Rational(1));
    EXPECT_EQ(r.branch_depth, 1u);
}

TEST(Eval, CoinInsideBoxedApplication) {
    auto t = raw(std::string("(\\!x. <") + kCoin + ", d(x)>) !(\\z.z)");
    for (const auto& s : standard_strategies()) {
        EvalOptions o;
        o.strategy = s;
        auto r = evaluate(t, o);
        EXPECT_EQ(r.distribution.prob_of(raw("<\\x.\\y.x, \\z.z>")), Rational(1, 2)) << s.name();
        EXPECT_EQ(r.distribution.prob_of(raw("<\\x.\\y.y, \\z.z>")), Rational(1, 2)) << s.name();
    }
}

TEST(Eval, MatchesNaiveReference) {
    for (const char* s : {"(\\f. f (\\x.x)) (\\y. proj(<y, \\z.z>))", "proj(<proj(<a, b>), c>)",
                          "(\\x. <x, proj(<\\u.u, \\v.\\w.w>)>) (\\q.q)"}) {
        auto t = raw(s);
        expect_matches_naive(t, evaluate(t).distribution);
    }
}

TEST(Eval, NestedProjections) {
    auto r = evaluate(raw("proj(<proj(<a, b>), c>)"));
    EXPECT_EQ(r.distribution.prob_of(raw("a")), Rational(1, 4));
    EXPECT_EQ(r.distribution.prob_of(raw("b")), Rational(1, 4));
    EXPECT_EQ(r.distribution.prob_of(raw("c")), Rational(1, 2));
    EXPECT_EQ(r.branch_depth, 2u);
}

TEST(Eval, AlphaEquivalentResultsMerge) {
    auto r = evaluate(raw("proj(<\\x.x, \\y.y>)"));
    EXPECT_EQ(r.distribution.support_size(), 1u);
    EXPECT_EQ(r.distribution.prob_of(raw("\\z.z")), Rational(1));
}

TEST(Eval, FuelExhaustion) {
    EvalOptions o;
    o.fuel = 10000;
    try {
        evaluate(raw(kOmega), o);
        FAIL();
    } catch (const FuelExhausted& e) {
        EXPECT_EQ(e.code(), "fuel-exhausted");
        EXPECT_EQ(e.fuel, 10000u);
    }
}

TEST(Eval, FuelFromEnvironment) {
    setenv("PSTA_FUEL", "123", 1);
    EXPECT_EQ(default_fuel(), 123u);
    unsetenv("PSTA_FUEL");
    EXPECT_EQ(default_fuel(), 1000000u);
}

TEST(Eval, MemoDoesNotChangeResults) {
    auto t = raw("(\\f. <f, proj(<\\a.a, \\b.\\c.c>)>) proj(<proj(<u, v>), proj(<u, v>)>)");
    EvalOptions a, b;
    b.memo = true;
    EXPECT_EQ(evaluate(t, a).distribution, evaluate(t, b).distribution);
}

TEST(Eval, StrategyParsing) {
    EXPECT_EQ(Strategy::parse("leftmost").kind, Strategy::Kind::LeftmostOutermost);
    EXPECT_EQ(Strategy::parse("rightmost").kind, Strategy::Kind::RightmostInnermost);
    EXPECT_EQ(Strategy::parse("random:7").seed, 7u);
    EXPECT_EQ(Strategy::parse("site:2").index, 2u);
    EXPECT_THROW(Strategy::parse("sideways"), Error);
}

TEST(Confluence, CoinAgrees) {
    auto rep = confluence_oracle(raw(kCoin));
    EXPECT_TRUE(rep.agree);
    EXPECT_TRUE(rep.complete);
    ASSERT_EQ(rep.distributions.size(), 1u);
}

TEST(Confluence, EveryOrderAgreesOnSLinearTerm) {
    auto rep = confluence_oracle(raw("(\\x. <x, proj(<\\u.u, \\v.\\w.w>)>) ((\\q.q) (\\r.r))"));
    EXPECT_TRUE(rep.agree);
    EXPECT_GT(rep.states, 3u);
}

TEST(Confluence, NonLinearTermDisagrees) {
    // duplicating a coin before or after flipping it
    auto rep = confluence_oracle(raw("(\\x. <x, x>) proj(<\\a.\\b.a, \\a.\\b.b>)"));
    EXPECT_TRUE(rep.complete);
    EXPECT_FALSE(rep.agree);
}

TEST(Confluence, LimitMakesItInconclusive) {
    auto rep = confluence_oracle(raw(kOmega), 100, 5);
    EXPECT_FALSE(rep.complete);
}
