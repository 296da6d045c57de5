#include "psta/syntax.hpp"
#include "psta/term.hpp"

#include <gtest/gtest.h>

using namespace psta;

namespace {
Term raw(const std::string& s) { return parse_term(s, false).term; }
} // namespace

TEST(Term, SizeCountsNodes) {
    EXPECT_EQ(size(var("x")), 1u);
    EXPECT_EQ(size(raw("\\x.x")), 2u);
    EXPECT_EQ(size(raw("(\\x.x) y")), 4u);
    EXPECT_EQ(size(raw("<x, y>")), 3u);
    EXPECT_EQ(size(raw("d(!x)")), 3u);
    // copy counts 2 on top of its four parts
    EXPECT_EQ(size(raw("copy^{\\x.x} y as a, b in <a, b>")), 2u + 2 + 1 + 1 + 1);
}

TEST(Term, FreeVariables) {
    auto t = raw("\\x. x y (\\!z. d(z) w)");
    EXPECT_EQ(free_vars(t), (std::set<std::string>{"y", "w"}));
    EXPECT_TRUE(occurs_free(t, "w"));
    EXPECT_FALSE(occurs_free(t, "x"));
    EXPECT_EQ(count_free(raw("x <x, d(x)>"), "x"), 3u);
    auto c = raw("copy^{\\u.u} v as a, b in <a, b>");
    EXPECT_EQ(free_vars(c), (std::set<std::string>{"v"}));
}

TEST(Term, SLinearity) {
    EXPECT_TRUE(is_s_linear(raw("\\x.\\y. x y")));
    EXPECT_FALSE(is_s_linear(raw("\\x. x x")));
    EXPECT_FALSE(is_s_linear(raw("\\x.\\y. x")));
    // the banged binder is unconstrained
    EXPECT_TRUE(is_s_linear(raw("\\!x. d(x) d(x)")));
    // exactly once, even across the components of a pair
    EXPECT_FALSE(is_s_linear(raw("\\x. <x, x>")));
    EXPECT_TRUE(s_linearity_violation(raw("\\x. x x")).has_value());
}

TEST(Term, SubstitutionAvoidsCapture) {
    auto t = substitute(raw("\\y. x y"), "x", raw("y"));
    EXPECT_TRUE(alpha_equal(t, raw("\\z. y z")));
    EXPECT_FALSE(alpha_equal(t, raw("\\y. y y")));
}

TEST(Term, AlphaEquality) {
    EXPECT_TRUE(alpha_equal(raw("\\x.\\y. x y"), raw("\\a.\\b. a b")));
    EXPECT_FALSE(alpha_equal(raw("\\x.\\y. x y"), raw("\\a.\\b. b a")));
    EXPECT_EQ(canonical_key(raw("\\!x. d(x)")), canonical_key(raw("\\!q. d(q)")));
}

TEST(Term, SurfaceSubstitutionStripsDerelictions) {
    // (z d³x d²x){!²y/x} = z d(y) y
    auto got = surface_substitute(raw("z d(d(d(x))) d(d(x))"), "x", raw("!!y"));
    EXPECT_TRUE(alpha_equal(got, raw("z d(y) y"))) << print_term(got);
}

TEST(Term, SurfaceSubstitutionStopsAtBareOccurrence) {
    // one layer is shared by every occurrence; the rest stays boxed
    auto got = surface_substitute(raw("<d(d(x)), d(x)>"), "x", raw("!!y"));
    EXPECT_TRUE(alpha_equal(got, raw("<d(!y), !y>"))) << print_term(got);
    auto none = surface_substitute(raw("z"), "x", raw("!y"));
    EXPECT_TRUE(alpha_equal(none, raw("z")));
}

TEST(Term, Values) {
    EXPECT_TRUE(is_value(raw("\\x.x")));
    EXPECT_TRUE(is_value(raw("<\\x.x, \\y.y>")));
    EXPECT_FALSE(is_value(raw("(\\x.x) (\\y.y)")));
    EXPECT_FALSE(is_value(raw("\\x. !x")));
    EXPECT_FALSE(is_value(raw("x"))); // open
}

TEST(Term, PathsAddressSubterms) {
    auto t = raw("<a, \\x. b x>");
    auto body = subterm_at(t, {1, 0});
    EXPECT_EQ(body->kind, TermKind::App);
    EXPECT_EQ(body->kids[0]->name, "b");
    auto r = replace_at(t, {0}, raw("c"));
    EXPECT_TRUE(alpha_equal(r, raw("<c, \\x. b x>")));
    EXPECT_THROW(subterm_at(t, {2}), Error);
}
