#include "psta/assign.hpp"
#include "psta/derivation.hpp"
#include "psta/reduction.hpp"
#include "psta/syntax.hpp"

#include <gtest/gtest.h>

using namespace psta;

namespace {

Derivation derive(const std::string& term, const std::string& type, const Context& ctx = {}) {
    auto e = parse_term(term, false);
    auto d = assign(e.term, parse_type(type), ctx, e.hints);
    check_derivation(d);
    return d;
}

// Every step of leftmost reduction keeps a checkable derivation whose
// weight strictly drops at r = rank.
void reduce_all(const Derivation& d) {
    const std::size_t r = rank(d);
    std::vector<Derivation> work{d};
    while (!work.empty()) {
        auto cur = work.back();
        work.pop_back();
        auto site = first_redex(cur->conclusion.subject);
        if (!site) continue;
        auto [a, b] = subject_reduce(cur, *site, r);
        check_derivation(a);
        EXPECT_LT(weight(a, r), weight(cur, r));
        work.push_back(a);
        if (site->kind == RedexKind::Proj) {
            check_derivation(b);
            EXPECT_LT(weight(b, r), weight(cur, r));
            work.push_back(b);
        }
    }
}

} // namespace

TEST(Derivation, SmartConstructors) {
    auto a = tvar("a");
    auto d = make_imp_il(make_ax("x", a), "x");
    EXPECT_TRUE(alpha_equal(d->conclusion.subject, parse_term("\\x.x").term));
    EXPECT_TRUE(type_equal(d->conclusion.type, imp(a, a)));
    auto g = make_forall_i(d, "a");
    EXPECT_TRUE(type_equal(g->conclusion.type, unit_type()));
    check_derivation(g);
    auto inst = make_forall_e(g, bool_type());
    EXPECT_TRUE(type_equal(inst->conclusion.type, imp(bool_type(), bool_type())));
}

TEST(Derivation, SideConditionsEnforced) {
    auto a = tvar("a");
    // eigenvariable free in the context
    EXPECT_THROW(make_forall_i(make_ax("x", a), "a"), CheckError);
    // application type mismatch
    EXPECT_THROW(make_imp_e(make_ax("f", imp(a, a)), make_ax("y", tvar("b"))), CheckError);
}

TEST(Derivation, RawNodesAreChecked) {
    auto a = tvar("a");
    auto ax = make_ax("x", a);
    auto bogus = make_raw(Rule::ImpIl, {.var = "x"}, {ax}, {{}, parse_term("\\x.x").term, imp(a, tvar("b"))});
    try {
        check_derivation(bogus);
        FAIL();
    } catch (const CheckError& e) {
        EXPECT_EQ(e.path, "$");
    }
}

TEST(Derivation, WeightAtOneIsSize) {
    for (const auto& [t, ty] : std::vector<std::pair<std::string, std::string>>{
             {"\\x.x", "1"}, {"proj(<\\x.x, \\y.y>)", "1"},
             {"((\\!x. d(x) d(x)) : !1 -o 1) !(\\y.y)", "1"}}) {
        auto d = derive(t, ty);
        EXPECT_EQ(weight(d, 1), size(d->conclusion.subject)) << t;
        EXPECT_LE(rank(d), size(d->conclusion.subject)) << t;
    }
}

TEST(Derivation, HandComputedMetrics) {
    // x:!!1 ⊢ (λ!z. d(d(z)) ⊗ d(d(z))) !!d(d(x)) : 1⊗1
    auto d = derive("(\\!z. d(d(z)) * d(d(z))) !(!(d(d(x))))", "1 * 1", {{"x", parse_type("!!1")}});
    // two occurrences merged twice: rank 2; two nested boxes: depth 2
    EXPECT_EQ(rank(d), 2u);
    EXPECT_EQ(depth(d), 2u);
    EXPECT_EQ(weight(d, 1), 17);
    EXPECT_EQ(weight(d, 2), 25);
    EXPECT_EQ(weight(d, 3), 37);
    for (unsigned r : {2u, 3u, 5u}) EXPECT_LE(weight(d, r), weight(d, 1) * r * r);
    reduce_all(d);
}

TEST(Derivation, SubjectReductionThroughProjAndCopy) {
    reduce_all(derive("proj(<(\\x.x) (\\y.y), \\z.z>)", "1"));
    reduce_all(derive("((\\!x. d(x) d(x)) : !1 -o 1) !((\\y.y) (\\w.w))", "1"));
    reduce_all(derive("proj(copy^{\\u.u} ((\\y.y) (\\w.w)) as a, b in <a, b>)", "1"));
}

TEST(Derivation, UnsoundBoxSharingRejected) {
    // both occurrences of z used bare under !!: the derivation shape that
    // breaks subject reduction without derelictions
    auto A = tvar("a");
    auto bb = tbangs(2, A);
    auto x = make_ax("x", A);
    auto sp1 = make_raw(Rule::Sp, {.renaming = {{"x", "x"}}}, {x}, {{{"x", tbang(A)}}, parse_term("!x", false).term, tbang(A)});
    auto sp2 = make_raw(Rule::Sp, {.renaming = {{"x", "x"}}}, {sp1}, {{{"x", bb}}, parse_term("!!x", false).term, bb});
    auto pairty = tensor_type({A, A});
    auto e = parse_term("\\f. f y1 y2", false);
    auto body = assign(e.term, pairty, {{"y1", A}, {"y2", A}}, e.hints);
    auto m = make_raw(Rule::M, {.var = "z", .type = A, .merged = {"y1", "y2"}}, {body},
                      {{{"z", bb}}, parse_term("\\f. f z z", false).term, pairty});
    auto lam = make_raw(Rule::ImpIe, {.var = "z"}, {m}, {{}, parse_term("\\!z. \\f. f z z", false).term, imp(bb, pairty)});
    auto top = make_raw(Rule::ImpE, {}, {lam, sp2}, {{{"x", bb}}, parse_term("(\\!z. \\f. f z z) !!x", false).term, pairty});
    EXPECT_THROW(check_derivation(top), CheckError);
}
