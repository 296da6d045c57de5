#include "psta/syntax.hpp"

#include <gtest/gtest.h>

using namespace psta;

TEST(Syntax, PrintParseRoundTrip) {
    for (const char* s : {"\\x.x", "\\!x.d(x) !d(x)", "proj(<\\x.\\y.x, \\x.\\y.y>)", "f (g h) !(k d(l))",
                          "copy^{\\x.x} v as a, b in <a, b>", "<d(d(x)), \\z.z>"}) {
        auto t = parse_term(s, false).term;
        auto again = parse_term(print_term(t), false).term;
        EXPECT_TRUE(alpha_equal(t, again)) << s;
    }
}

TEST(Syntax, UnicodeInput) {
    auto a = parse_term("λx.λy.⟨x, y⟩", false).term;
    auto b = parse_term("\\x.\\y.<x, y>", false).term;
    EXPECT_TRUE(alpha_equal(a, b));
    EXPECT_EQ(print_term(parse_term("\\x.x").term, true), "λx.x");
}

TEST(Syntax, Comments) {
    auto t = parse_term("# a comment\n\\x.x # trailing\n").term;
    EXPECT_TRUE(alpha_equal(t, parse_term("\\x.x").term));
}

TEST(Syntax, ErrorsCarryPositions) {
    try {
        parse_term("\\x. (x");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.code(), "syntax-error");
        EXPECT_EQ(e.line, 1u);
        EXPECT_EQ(e.col, 7u);
    }
    try {
        parse_term("\n  \\x. x x");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "not-s-linear");
        EXPECT_EQ(std::string(e.what()).rfind("2:", 0), 0u) << e.what();
    }
}

TEST(Syntax, Types) {
    for (const char* s : {"forall a. a -o a", "!!1", "B -o B & B", "forall a. !(B -o a -o a) -o a -o a"}) {
        auto t = parse_type(s);
        EXPECT_TRUE(type_equal(t, parse_type(print_type(t)))) << s;
    }
    EXPECT_TRUE(type_equal(parse_type("1"), parse_type("forall b. b -o b")));
    EXPECT_TRUE(type_equal(parse_type("B"), bool_type()));
    EXPECT_TRUE(type_equal(parse_type("N_2"), nat_type(2)));
    EXPECT_TRUE(type_equal(parse_type("S_1"), string_type(1)));
    EXPECT_TRUE(type_equal(parse_type("B * 1"), tensor_type({bool_type(), unit_type()})));
    EXPECT_THROW(parse_type("a -o"), ParseError);
}

TEST(Syntax, SugarElaborates) {
    auto e = parse_term("let I be I in I");
    EXPECT_TRUE(is_s_linear(e.term));
    auto t = parse_term("x * y", false).term; // λf. f x y
    EXPECT_TRUE(alpha_equal(t, parse_term("\\f. f x y", false).term));
}
