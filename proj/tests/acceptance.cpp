// Acceptance suite: one PASS/FAIL line per criterion.
//
// Exit status is nonzero only when a criterion fails that is not listed in
// kDocumented (criteria whose failure is a known, documented deviation).

#include "psta/assign.hpp"
#include "psta/encodings.hpp"
#include "psta/generate.hpp"
#include "psta/reduction.hpp"
#include "psta/syntax.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace psta;
using boost::multiprecision::cpp_int;

namespace {

const std::set<int> kDocumented = {6}; // strategy uniformity of branch depth

const char* kCoin = "proj(<\\x.\\y.x, \\x.\\y.y>)";
const char* kOmega = "(\\!x. d(x) !d(x)) !(\\!x. d(x) !d(x))";

Term raw(const std::string& s) { return parse_term(s, false).term; }

PtmSpec load(const std::string& name) {
    std::ifstream in(std::string(PSTA_SAMPLES) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_ptm(ss.str());
}

std::vector<std::string> inputs_up_to(std::size_t n) {
    std::vector<std::string> out{""};
    for (std::size_t len = 1; len <= n; ++len)
        for (unsigned v = 0; v < (1u << len); ++v) {
            std::string s;
            for (std::size_t i = 0; i < len; ++i) s += (v >> (len - 1 - i) & 1) ? '1' : '0';
            out.push_back(s);
        }
    return out;
}

cpp_int ipow(std::size_t b, std::size_t e) { return boost::multiprecision::pow(cpp_int(b), static_cast<unsigned>(e)); }

// ---- running records shared by several criteria

struct DerivationLedger {
    std::size_t count = 0, with_values = 0;
    std::string weight_problem, value_problem;

    void note(const Derivation& d) {
        ++count;
        const auto m = size(d->conclusion.subject);
        const auto d1 = weight(d, 1);
        const auto dep = depth(d);
        std::ostringstream why;
        if (d1 != m) why << "w(D,1) = " << d1 << " but |M| = " << m;
        else if (rank(d) > m) why << "rank " << rank(d) << " > |M| = " << m;
        for (std::size_t r : {2u, 3u, 5u})
            if (why.str().empty() && weight(d, r) > ipow(r, dep) * d1) why << "w(D," << r << ") exceeds r^d w(D,1)";
        if (weight_problem.empty() && !why.str().empty()) weight_problem = why.str() + " for " + print_term(d->conclusion.subject);
        for (const auto& vb : with_value_bounds(d)) {
            ++with_values;
            if (vb.value_size > vb.type_size && value_problem.empty())
                value_problem = "|V| = " + std::to_string(vb.value_size) + " > |A| = " + std::to_string(vb.type_size);
        }
    }
};

struct EvalLedger {
    std::size_t typed = 0, compared = 0, nonuniform = 0;
    std::string bound_problem, example;

    void note(const Derivation& d, std::size_t branch_depth) {
        ++typed;
        if (cpp_int(branch_depth) > ipow(size(d->conclusion.subject), depth(d) + 1) && bound_problem.empty())
            bound_problem = "branch depth " + std::to_string(branch_depth) + " for " + print_term(d->conclusion.subject);
    }

    // all four strategies; returns the leftmost distribution
    SurfaceDistribution note_all(const Derivation& d) {
        std::vector<std::size_t> depths;
        SurfaceDistribution first;
        for (const auto& s : standard_strategies()) {
            EvalOptions o;
            o.strategy = s;
            auto r = evaluate(d->conclusion.subject, o);
            note(d, r.branch_depth);
            if (depths.empty()) first = r.distribution;
            depths.push_back(r.branch_depth);
        }
        ++compared;
        if (std::set<std::size_t>(depths.begin(), depths.end()).size() > 1) {
            ++nonuniform;
            if (example.empty() || print_term(d->conclusion.subject).size() < example.size()) {
                std::string ds;
                for (auto x : depths) ds += (ds.empty() ? "" : "/") + std::to_string(x);
                example = print_term(d->conclusion.subject) + " (depths " + ds + ")";
            }
        }
        return first;
    }
};

DerivationLedger g_ders;
EvalLedger g_evals;

Derivation derive(const std::string& text, const std::string& type, const Context& ctx = {}) {
    auto e = parse_term(text, false);
    auto d = assign(e.term, parse_type(type), ctx, e.hints);
    check_derivation(d);
    g_ders.note(d);
    return d;
}

// ⊢ !^n s̲ : !^n 𝐒_1, then the compiled program applied to it
Derivation applied(const CompiledPtm& c, const std::string& input) {
    auto arg = string_term(input, 1).derivation;
    for (std::size_t i = 0; i < c.bangs; ++i) arg = make_sp(arg, {});
    auto d = make_imp_e(c.program.derivation, arg);
    g_ders.note(d);
    return d;
}

// ---- reporting

struct Outcome {
    bool pass;
    std::string detail;
};

int g_unexpected = 0;

void report(int n, const std::function<Outcome()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool documented = !o.pass && kDocumented.count(n);
    if (!o.pass && !documented) ++g_unexpected;
    std::ostringstream t;
    t.precision(2);
    t << std::fixed << secs << "s";
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << " [" << t.str() << "] " << o.detail
              << (documented ? " (documented deviation)" : "") << std::endl;
}

// ---- criteria

// the textbook coin uses non-linear booleans, so these run untyped
SurfaceDistribution every_strategy(const Term& t, bool& same) {
    SurfaceDistribution first;
    bool have = false;
    for (const auto& s : standard_strategies()) {
        EvalOptions o;
        o.strategy = s;
        auto d = evaluate(t, o).distribution;
        if (have && !(d == first)) same = false;
        if (!have) first = d;
        have = true;
    }
    return first;
}

Outcome worked_examples() {
    bool same = true;
    auto d = every_strategy(raw(kCoin), same);
    bool ok = d.support_size() == 2 && d.prob_of(raw("\\x.\\y.x")) == Rational(1, 2) && d.prob_of(raw("\\x.\\y.y")) == Rational(1, 2);

    auto f = every_strategy(raw(std::string("(\\!x. <") + kCoin + ", d(x)>) !(\\z.z)"), same);
    ok = ok && same && f.support_size() == 2 && f.prob_of(raw("<\\x.\\y.x, \\z.z>")) == Rational(1, 2) &&
         f.prob_of(raw("<\\x.\\y.y, \\z.z>")) == Rational(1, 2);

    bool exhausted = false;
    try {
        EvalOptions o;
        o.fuel = 10000;
        evaluate(raw(kOmega), o);
    } catch (const FuelExhausted& e) {
        exhausted = e.code() == "fuel-exhausted";
    }
    return {ok && exhausted, std::string("coin 1/2,1/2; boxed pair 1/2,1/2; omega ") + (exhausted ? "fuel-exhausted" : "did not exhaust")};
}

Outcome golden_substitution() {
    auto got = surface_substitute(raw("z d(d(d(x))) d(d(x))"), "x", raw("!!y"));
    return {alpha_equal(got, raw("z d(y) y")), "got " + print_term(got)};
}

std::vector<Built> g_generated;

Outcome confluence() {
    g_generated = generate_typed(520, 2024);
    std::size_t bad = 0, incomplete = 0, states = 0;
    for (const auto& b : g_generated) {
        g_ders.note(b.derivation);
        auto rep = confluence_oracle(b.term);
        states += rep.states;
        if (!rep.complete) ++incomplete;
        else if (!rep.agree) ++bad;
        auto left = g_evals.note_all(b.derivation);
        if (rep.complete && rep.agree && !(rep.distributions.front() == left)) ++bad;
    }
    std::size_t maxsize = 0;
    for (const auto& b : g_generated) maxsize = std::max(maxsize, size(b.term));
    return {bad == 0 && incomplete == 0 && g_generated.size() >= 500,
            std::to_string(g_generated.size()) + " terms (max size " + std::to_string(maxsize) + "), " + std::to_string(states) +
                " states explored, " + std::to_string(bad) + " disagreements, " + std::to_string(incomplete) + " truncated"};
}

Outcome subject_reduction() {
    std::size_t derivations = 0, steps = 0, bad = 0;
    std::string first;
    auto sr = [&](const Derivation& root) {
        const std::size_t r = rank(root);
        std::vector<Derivation> work{root};
        while (!work.empty()) {
            auto cur = work.back();
            work.pop_back();
            auto site = first_redex(cur->conclusion.subject);
            if (!site) continue;
            auto [a, b] = subject_reduce(cur, *site, r);
            std::vector<Derivation> next{a};
            if (site->kind == RedexKind::Proj) next.push_back(b);
            for (const auto& n : next) {
                ++steps;
                check_derivation(n);
                g_ders.note(n);
                if (!(weight(n, r) < weight(cur, r))) {
                    ++bad;
                    if (first.empty()) first = print_term(cur->conclusion.subject);
                }
                work.push_back(n);
            }
        }
    };
    for (const auto& b : g_generated) {
        if (derivations == 250) break;
        sr(b.derivation);
        ++derivations;
    }
    return {bad == 0 && derivations >= 200, std::to_string(derivations) + " derivations, " + std::to_string(steps) +
                                                " steps, " + std::to_string(bad) + " without strict decrease" +
                                                (first.empty() ? "" : " (e.g. " + first + ")")};
}

Outcome weight_identities() {
    return {g_ders.weight_problem.empty(),
            std::to_string(g_ders.count) + " derivations checked" + (g_ders.weight_problem.empty() ? "" : ": " + g_ders.weight_problem)};
}

Outcome polystep_and_uniformity() {
    // smallest witness of non-uniform depths, independent of the generator
    auto w = derive("proj(<(\\x.x) (\\y.y), (\\x.x) (\\y.y)>)", "1");
    g_evals.note_all(w);
    bool bound = g_evals.bound_problem.empty();
    std::string detail = "polystep bound " + std::string(bound ? "holds" : "VIOLATED: " + g_evals.bound_problem) + " on " +
                         std::to_string(g_evals.typed) + " typed evaluations; branch depth differs across strategies on " +
                         std::to_string(g_evals.nonuniform) + " of " + std::to_string(g_evals.compared) + " terms";
    if (g_evals.nonuniform) detail += ", e.g. " + g_evals.example;
    return {bound && g_evals.nonuniform == 0, detail};
}

Outcome values_and_enumeration() {
    auto inh = value_inhabitants(bool_type(), type_size(bool_type()));
    std::set<int> bits;
    for (const auto& b : inh) {
        g_ders.note(b.derivation);
        if (auto v = decode_bool(b.term)) bits.insert(*v);
    }
    bool enum_ok = inh.size() == 2 && bits == std::set<int>{0, 1};
    return {enum_ok && g_ders.value_problem.empty() && g_ders.with_values > 0,
            std::to_string(g_ders.with_values) + " withI values checked" +
                (g_ders.value_problem.empty() ? "" : " (" + g_ders.value_problem + ")") + "; " + std::to_string(inh.size()) +
                " closed values at B of size <= " + std::to_string(type_size(bool_type()))};
}

std::size_t nat_of(const Term& t) {
    EvalOptions o;
    o.memo = true;
    auto r = evaluate(t, o);
    if (r.distribution.support_size() != 1) return ~std::size_t{0};
    return decode_numeral(r.distribution.entries().begin()->second.term).value_or(~std::size_t{0});
}

Outcome arithmetic() {
    std::vector<std::size_t> got;
    got.push_back(nat_of(app(succ_term(1).term, numeral(0, 1).term)));
    got.push_back(nat_of(apps(add_term(1, 1).term, {numeral(2, 1).term, numeral(3, 1).term})));
    got.push_back(nat_of(apps(mult_term(1, 1).term, {numeral(2, 1).term, bang(numeral(3, 1).term)})));
    got.push_back(nat_of(app(len_term(1).term, string_term("010", 1).term)));
    auto p = poly_to_term(Polynomial::parse("x^2+1"));
    got.push_back(nat_of(app(bang_lam("x", p.term), bangs(2, numeral(3, 1).term)))); // x : !^2 N
    for (const auto& b : {succ_term(1), add_term(1, 1), mult_term(1, 1), len_term(1), p}) g_ders.note(b.derivation);
    std::string s;
    for (auto v : got) s += (s.empty() ? "" : ", ") + std::to_string(v);
    return {got == std::vector<std::size_t>{1, 5, 6, 3, 10}, "decoded " + s};
}

Shape in_shape(std::size_t k) { return Shape::tuple({Shape::bools(k), Shape::boolean()}); }
Shape out_shape(std::size_t k) { return Shape::tuple({Shape::bools(k), Shape::boolean(), Shape::boolean()}); }

std::string bits(unsigned v, std::size_t w) {
    std::string s;
    for (std::size_t i = 0; i < w; ++i) s += (v >> (w - 1 - i) & 1) ? '1' : '0';
    return s;
}

std::vector<TransitionRow> random_table(std::size_t k, std::mt19937& rng) {
    std::vector<TransitionRow> rows;
    for (unsigned q = 0; q < (1u << k); ++q)
        for (int r = 0; r < 2; ++r)
            rows.push_back({bits(q, k), r, bits(rng() % (1u << k), k), static_cast<int>(rng() % 2), rng() % 2 ? 'L' : 'R'});
    return rows;
}

std::string expected_out(const TransitionRow& row) { return row.next + std::to_string(row.write) + (row.move == 'R' ? "1" : "0"); }

Outcome delta_brute_force() {
    std::mt19937 rng(99);
    std::size_t checked = 0, bad = 0, mixes = 0;
    EvalOptions o;
    o.memo = true;
    for (std::size_t k = 1; k <= 2; ++k)
        for (int table = 0; table < 6; ++table) {
            auto rows0 = random_table(k, rng), rows1 = random_table(k, rng);
            auto d0 = delta_encode(rows0, k), d1 = delta_encode(rows1, k);
            g_ders.note(d0.derivation);
            for (const auto& row : rows0) {
                auto arg = typed(enc::data(in_shape(k), row.state + std::to_string(row.read)), delta_in_type(k));
                auto r = evaluate(app(d0.term, arg.term), o);
                ++checked;
                if (r.distribution.support_size() != 1 ||
                    decode_bools(r.distribution.entries().begin()->second.term, out_shape(k)) != expected_out(row))
                    ++bad;
            }
            // mixture: δ0 and δ1 each with 1/2, collapsing when they agree
            const bool same = table == 0;
            auto dp = delta_p_term(d0, same ? d0 : d1, k);
            g_ders.note(dp.derivation);
            for (std::size_t i = 0; i < rows0.size(); ++i) {
                auto arg = typed(enc::data(in_shape(k), rows0[i].state + std::to_string(rows0[i].read)), delta_in_type(k));
                auto r = evaluate(app(dp.term, arg.term), o);
                std::map<std::string, Rational> got, want;
                for (const auto& [key, e] : r.distribution.entries()) got[decode_bools(e.term, out_shape(k)).value_or("?")] += e.prob;
                want[expected_out(rows0[i])] += Rational(1, 2);
                want[expected_out(same ? rows0[i] : rows1[i])] += Rational(1, 2);
                ++mixes;
                if (got != want) ++bad;
            }
        }
    return {bad == 0, std::to_string(checked) + " table lookups and " + std::to_string(mixes) + " mixtures over k in {1,2}, " +
                          std::to_string(bad) + " mismatches"};
}

struct Machine {
    std::string file;
    Polynomial time, space;
};

std::vector<Machine> machines() {
    return {{"coin-writer.json", Polynomial::parse("x+1"), Polynomial::parse("x+1")},
            {"copier.json", Polynomial::parse("x+2"), Polynomial::parse("x+2")},
            {"random-walk.json", Polynomial::parse("x+1"), Polynomial::parse("x+1")}};
}

Outcome end_to_end() {
    std::size_t runs = 0, bad = 0;
    std::string first;
    for (const auto& m : machines()) {
        auto spec = load(m.file);
        auto c = ptm_compile(spec, m.time, m.space);
        for (const auto& in : inputs_up_to(3)) {
            auto oracle = ptm_run(spec, in, m.time(in.size()), m.space(in.size()));
            EvalOptions o;
            o.memo = true;
            auto d = applied(c, in);
            auto r = evaluate(d->conclusion.subject, o);
            g_evals.note(d, r.branch_depth);
            std::map<std::string, Rational> got;
            for (const auto& [k, e] : r.distribution.entries()) got[decode_string(e.term).value_or("?")] += e.prob;
            ++runs;
            if (got != oracle.tapes) {
                ++bad;
                if (first.empty()) first = m.file + " on '" + in + "'";
            }
        }
    }
    return {bad == 0, std::to_string(runs) + " runs over 3 machines, inputs of length <= 3, " + std::to_string(bad) + " mismatches" +
                          (first.empty() ? "" : " (first: " + first + ")")};
}

Outcome predicates() {
    auto ms = machines();
    ms.push_back({"three-quarters.json", Polynomial::parse("2"), Polynomial::parse("x+1")});
    std::size_t checks = 0, bad = 0, verdict_mismatch = 0;
    for (const auto& m : ms) {
        auto spec = load(m.file);
        auto c = ptm_compile(spec, m.time, m.space, Extraction::Verdict);
        std::map<std::string, Verdicts> oracle, compiled;
        for (const auto& in : inputs_up_to(3)) {
            oracle[in] = ptm_run(spec, in, m.time(in.size()), m.space(in.size())).verdicts;
            EvalOptions o;
            o.memo = true;
            auto d = applied(c, in);
            auto r = evaluate(d->conclusion.subject, o);
            g_evals.note(d, r.branch_depth);
            Verdicts v;
            for (const auto& [k, e] : r.distribution.entries()) {
                auto b = decode_bool(e.term);
                if (!b) throw Error("decode-failed", "not a boolean: " + print_term(e.term));
                (*b == 0 ? v.accept : v.reject) += e.prob;
            }
            compiled[in] = v;
            if (v.accept != oracle[in].accept || v.reject != oracle[in].reject) ++verdict_mismatch;
        }
        // several candidate languages: everything, nothing, odd parity
        std::vector<std::map<std::string, bool>> languages(3);
        for (const auto& [in, v] : oracle) {
            languages[0][in] = true;
            languages[1][in] = false;
            languages[2][in] = std::count(in.begin(), in.end(), '1') % 2 == 1;
        }
        for (const auto& lang : languages) {
            for (const Rational& eps : {Rational(1, 4), Rational(1, 2)}) {
                ++checks;
                if (recognizes_with_error(oracle, lang, eps) != recognizes_with_error(compiled, lang, eps)) ++bad;
            }
            ++checks;
            if (accepts_by_majority(oracle, lang) != accepts_by_majority(compiled, lang)) ++bad;
        }
    }
    return {bad == 0 && verdict_mismatch == 0, std::to_string(checks) + " predicate checks on 4 machines, " + std::to_string(bad) +
                                                   " disagreements, " + std::to_string(verdict_mismatch) + " verdict mismatches"};
}

Outcome negative_and_corrected() {
    // the box-sharing derivation: both copies of z used without dereliction
    auto A = tvar("a");
    auto bb = tbangs(2, A);
    auto sp1 = make_raw(Rule::Sp, {.renaming = {{"x", "x"}}}, {make_ax("x", A)}, {{{"x", tbang(A)}}, raw("!x"), tbang(A)});
    auto sp2 = make_raw(Rule::Sp, {.renaming = {{"x", "x"}}}, {sp1}, {{{"x", bb}}, raw("!!x"), bb});
    auto pairty = tensor_type({A, A});
    auto e = parse_term("\\f. f y1 y2", false);
    auto body = assign(e.term, pairty, {{"y1", A}, {"y2", A}}, e.hints);
    auto m = make_raw(Rule::M, {.var = "z", .type = A, .merged = {"y1", "y2"}}, {body}, {{{"z", bb}}, raw("\\f. f z z"), pairty});
    auto lam = make_raw(Rule::ImpIe, {.var = "z"}, {m}, {{}, raw("\\!z. \\f. f z z"), imp(bb, pairty)});
    auto top = make_raw(Rule::ImpE, {}, {lam, sp2}, {{{"x", bb}}, raw("(\\!z. \\f. f z z) !!x"), pairty});
    std::string rejected;
    try {
        check_derivation(top);
    } catch (const CheckError& err) {
        rejected = err.what();
    }

    auto good = derive("(\\!z. d(d(z)) * d(d(z))) !(!(d(d(x))))", "1 * 1", {{"x", parse_type("!!1")}});
    const std::size_t r = rank(good);
    auto site = first_redex(good->conclusion.subject);
    bool reduced = false;
    if (site) {
        auto [a, b] = subject_reduce(good, *site, r);
        check_derivation(a);
        g_ders.note(a);
        reduced = alpha_equal(a->conclusion.subject, raw("\\f. f d(d(x)) d(d(x))")) && weight(a, r) < weight(good, r) &&
                  !first_redex(a->conclusion.subject);
    }
    return {!rejected.empty() && reduced, (rejected.empty() ? std::string("box-sharing derivation ACCEPTED") : "rejected: " + rejected) +
                                              "; corrected judgment " + (reduced ? "reduces to d(d(x)) * d(d(x))" : "did not reduce as expected")};
}

} // namespace

int main() {
    report(1, worked_examples);
    report(2, golden_substitution);
    report(3, confluence);
    report(4, subject_reduction);
    report(7, values_and_enumeration);
    report(8, arithmetic);
    report(9, delta_brute_force);
    report(10, end_to_end);
    report(11, predicates);
    report(12, negative_and_corrected);
    // these summarise everything built or evaluated above
    report(5, weight_identities);
    report(6, polystep_and_uniformity);
    std::cout << (g_unexpected ? "acceptance: unexpected failures" : "acceptance: no unexpected failures") << std::endl;
    return g_unexpected ? 1 : 0;
}
