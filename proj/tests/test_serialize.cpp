#include "psta/assign.hpp"
#include "psta/serialize.hpp"
#include "psta/syntax.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

using namespace psta;
using json = nlohmann::json;

namespace {
Derivation sample() {
    auto e = parse_term("(\\!z. d(d(z)) * d(d(z))) !(!(d(d(x))))");
    return assign(e.term, parse_type("1 * 1"), {{"x", parse_type("!!1")}}, e.hints);
}
} // namespace

TEST(Serialize, DerivationRoundTrip) {
    auto d = sample();
    auto text = derivation_to_json(d);
    auto back = parse_derivation(text);
    EXPECT_TRUE(alpha_equal(back->conclusion.subject, d->conclusion.subject));
    EXPECT_TRUE(type_equal(back->conclusion.type, d->conclusion.type));
    EXPECT_EQ(node_count(back), node_count(d));
    EXPECT_EQ(weight(back, 2), weight(d, 2));
    EXPECT_EQ(derivation_to_json(back), text);
}

TEST(Serialize, ConclusionsAreOptional) {
    auto j = json::parse(derivation_to_json(sample()));
    std::function<void(json&)> strip = [&](json& n) {
        n.erase("conclusion");
        if (n.contains("premises"))
            for (auto& p : n["premises"]) strip(p);
    };
    strip(j);
    auto back = parse_derivation(j.dump());
    EXPECT_TRUE(alpha_equal(back->conclusion.subject, sample()->conclusion.subject));
}

TEST(Serialize, SchemaErrorsNameTheField) {
    try {
        parse_derivation(R"({"rule":"ax"})");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "schema-error");
        EXPECT_NE(std::string(e.what()).find("var"), std::string::npos);
    }
    try {
        parse_derivation(R"({"rule":"impIl","var":"x","premises":[{"rule":"nope"}]})");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("$.premises[0]"), std::string::npos) << e.what();
    }
    EXPECT_THROW(parse_derivation("{"), Error);
}

TEST(Serialize, TamperedConclusionRejected) {
    auto j = json::parse(derivation_to_json(sample()));
    j["premises"][0]["conclusion"]["type"] = json{{"tvar", "q"}};
    EXPECT_THROW(parse_derivation(j.dump()), CheckError);
}

TEST(Serialize, DistributionOrdering) {
    auto e1 = parse_term("\\x.\\y.y", false).term;
    auto e2 = parse_term("\\x.\\y.x", false).term;
    auto e3 = parse_term("\\z.z").term;
    SurfaceDistribution d;
    d.add(e1, Rational(1, 4));
    d.add(e2, Rational(1, 4));
    d.add(e3, Rational(1, 2));
    auto j = json::parse(format_distribution(d));
    ASSERT_EQ(j.size(), 3u);
    EXPECT_EQ(j[0]["prob"], "1/2");
    EXPECT_EQ(j[1]["term"], "\\x.\\y.x");
    EXPECT_EQ(j[2]["term"], "\\x.\\y.y");
}

TEST(Serialize, ErrorJson) {
    auto j = json::parse(error_json("fuel-exhausted", "out of fuel"));
    EXPECT_EQ(j["error"]["code"], "fuel-exhausted");
    EXPECT_EQ(j["error"]["message"], "out of fuel");
}
