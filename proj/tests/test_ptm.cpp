#include "psta/encodings.hpp"
#include "psta/ptm.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace psta;

namespace {

PtmSpec load(const std::string& name) {
    std::ifstream in(std::string(PSTA_SAMPLES) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_ptm(ss.str());
}

std::map<std::string, Rational> run_compiled(const PtmSpec& s, const std::string& input, std::size_t steps, std::size_t tape) {
    auto c = ptm_compile(s, Polynomial{{steps}}, Polynomial{{tape}});
    EvalOptions o;
    o.memo = true;
    std::map<std::string, Rational> out;
    auto r = evaluate(apply_compiled(c, input), o);
    for (const auto& [k, e] : r.distribution.entries()) out[decode_string(e.term).value()] += e.prob;
    return out;
}

} // namespace

TEST(Ptm, SamplesParse) {
    for (const char* n : {"coin-writer.json", "copier.json", "random-walk.json", "three-quarters.json"}) {
        auto s = load(n);
        auto again = parse_ptm(ptm_to_json(s));
        EXPECT_EQ(ptm_to_json(again), ptm_to_json(s)) << n;
    }
}

TEST(Ptm, SchemaErrors) {
    try {
        parse_ptm(R"({"state_width":1,"initial":"0","accepting":[],"rejecting":[],"delta0":[{"state":"2"}],"delta1":[]})");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "schema-error");
        EXPECT_NE(std::string(e.what()).find("$.delta0[0].state"), std::string::npos) << e.what();
    }
    try {
        parse_ptm(R"({"state_width":1,"initial":"0","accepting":[],"rejecting":[],"delta0":[],"delta1":[]})");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "non-total-table");
    }
}

TEST(Ptm, CoinWriterOracle) {
    auto r = ptm_run(load("coin-writer.json"), "0", 1, 1);
    EXPECT_EQ(r.tapes, (std::map<std::string, Rational>{{"0", Rational(1, 2)}, {"1", Rational(1, 2)}}));
    EXPECT_EQ(r.verdicts.accept, Rational(1));
}

TEST(Ptm, ThreeQuarters) {
    auto r = ptm_run(load("three-quarters.json"), "", 2, 1);
    EXPECT_EQ(r.verdicts.accept, Rational(3, 4));
    EXPECT_EQ(r.verdicts.reject, Rational(1, 4));
}

TEST(Ptm, RandomWalkByHand) {
    // two steps from cell 0 on "00": L stays put at the left edge, R advances
    auto r = ptm_run(load("random-walk.json"), "00", 2, 2);
    Rational total = 0;
    for (const auto& [t, p] : r.tapes) total += p;
    EXPECT_EQ(total, Rational(1));
    EXPECT_EQ(r.tapes.at("11"), Rational(1, 2)); // moved right first: the second write lands on cell 1
    EXPECT_EQ(r.tapes.at("10"), Rational(1, 2));
}

TEST(Ptm, OracleErrors) {
    auto s = load("coin-writer.json");
    EXPECT_THROW(ptm_run(s, "012", 1, 3), Error);
    EXPECT_THROW(ptm_run(s, "00", 1, 1), Error);
    try {
        ptm_run(s, "", 0, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "unhalted-path");
    }
}

TEST(Ptm, Predicates) {
    std::map<std::string, Verdicts> res{{"a", {Rational(3, 4), Rational(1, 4)}}, {"b", {Rational(1, 4), Rational(3, 4)}}};
    std::map<std::string, bool> mem{{"a", true}, {"b", false}};
    EXPECT_TRUE(recognizes_with_error(res, mem, Rational(1, 4)));
    EXPECT_FALSE(recognizes_with_error(res, mem, Rational(1, 8)));
    EXPECT_TRUE(accepts_by_majority(res, mem));
    EXPECT_FALSE(accepts_by_majority(res, {{"a", false}, {"b", false}}));
    EXPECT_THROW(accepts_by_majority(res, {{"a", true}}), Error);
}

TEST(Ptm, CompiledCoinWriterMatchesOracle) {
    auto s = load("coin-writer.json");
    for (const char* in : {"", "0", "1"}) EXPECT_EQ(run_compiled(s, in, 1, 1), ptm_run(s, in, 1, 1).tapes) << in;
}

TEST(Ptm, CompiledCopierMatchesOracle) {
    auto s = load("copier.json");
    for (const char* in : {"10", "01"}) EXPECT_EQ(run_compiled(s, in, 3, 2), ptm_run(s, in, 3, 2).tapes) << in;
}

TEST(Ptm, CompiledTypes) {
    auto c = ptm_compile(load("coin-writer.json"), Polynomial::parse("x+1"), Polynomial::parse("x"));
    EXPECT_EQ(c.bangs, 2u);
    EXPECT_EQ(c.index, 3u);
    EXPECT_TRUE(type_equal(c.program.type, imp(tbangs(2, string_type(1)), string_type(3))));
    auto v = ptm_compile(load("coin-writer.json"), Polynomial::parse("x+1"), Polynomial::parse("x"), Extraction::Verdict);
    EXPECT_TRUE(type_equal(v.program.type, imp(tbangs(2, string_type(1)), bool_type())));
}
