// psta: command-line front end for the PSTA toolkit.
//
// exit codes: 0 ok, 1 negative answer (check failed, distributions differ,
// confluence disagreement), 2 fuel exhausted, 3 bad input, 4 internal error.

#include "psta/assign.hpp"
#include "psta/encodings.hpp"
#include "psta/eval.hpp"
#include "psta/ptm.hpp"
#include "psta/serialize.hpp"
#include "psta/syntax.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace psta;
using json = nlohmann::ordered_json;

namespace {

bool g_json = false;

struct Exit {
    int code;
};

std::string slurp(const std::string& path) {
    if (path == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in) throw Error("io-error", "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

int fail(const std::string& code, const std::string& msg, int status) {
    if (g_json) std::cout << error_json(code, msg) << "\n";
    else std::cerr << "error[" << code << "]: " << msg << "\n";
    return status;
}

Polynomial constant(std::size_t n) { return Polynomial{{n}}; }

Context parse_context(const std::vector<std::string>& items) {
    Context ctx;
    for (const auto& it : items) {
        auto colon = it.find(':');
        if (colon == std::string::npos) throw Error("bad-context", "expected name:type, got '" + it + "'");
        ctx[it.substr(0, colon)] = parse_type(it.substr(colon + 1));
    }
    return ctx;
}

json verdicts_json(const Verdicts& v) {
    return {{"accept", rational_string(v.accept)}, {"reject", rational_string(v.reject)}};
}

json tapes_json(const std::map<std::string, Rational>& tapes) {
    std::vector<std::pair<std::string, Rational>> rows(tapes.begin(), tapes.end());
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    json out = json::array();
    for (const auto& [t, p] : rows) out.push_back({{"tape", t}, {"prob", rational_string(p)}});
    return out;
}

// --- subcommands ---------------------------------------------------------

struct EvalArgs {
    std::string file, strategy = "leftmost";
    std::size_t fuel = 0;
    bool strict = false, memo = false, unicode = false;
};

int cmd_eval(const EvalArgs& a) {
    auto e = parse_term(slurp(a.file), a.strict);
    EvalOptions o;
    o.strategy = Strategy::parse(a.strategy);
    o.fuel = a.fuel;
    o.memo = a.memo;
    auto r = evaluate(e.term, o);
    if (g_json) {
        std::cout << format_distribution(r.distribution, 2) << "\n";
        return 0;
    }
    auto rows = json::parse(format_distribution(r.distribution));
    for (const auto& row : rows) {
        std::string term = row["term"];
        if (a.unicode) {
            for (const auto& en : r.distribution.entries())
                if (print_term(en.second.term) == term) term = print_term(en.second.term, true);
        }
        std::cout << row["prob"].get<std::string>() << "\t" << term << "\n";
    }
    std::cout << "# branch depth " << r.branch_depth << ", " << r.steps_total << " steps\n";
    return 0;
}

int cmd_derive(const std::string& file, const std::string& type, const std::vector<std::string>& ctx, bool strict) {
    auto e = parse_term(slurp(file), strict);
    auto d = assign(e.term, parse_type(type), parse_context(ctx), e.hints);
    std::cout << derivation_to_json(d) << "\n";
    return 0;
}

int cmd_check(const std::string& file) {
    auto d = parse_derivation(slurp(file));
    const auto& c = d->conclusion;
    if (g_json) {
        emit({{"ok", true}, {"subject", print_term(c.subject)}, {"type", print_type(c.type)}});
    } else {
        for (const auto& [x, t] : c.context) std::cout << x << " : " << print_type(t) << "\n";
        std::cout << "|- " << print_term(c.subject) << " : " << print_type(c.type) << "\n";
    }
    return 0;
}

int cmd_metrics(const std::string& file, std::size_t r) {
    auto d = parse_derivation(slurp(file));
    std::size_t rr = r ? r : rank(d);
    auto m = metrics(d, rr);
    json j = {{"size", size(d->conclusion.subject)}, {"rank", m.rank}, {"depth", m.depth}, {"r", rr},
              {"weight", m.weight.str()}, {"nodes", node_count(d)}};
    if (g_json) emit(j);
    else
        for (auto it = j.begin(); it != j.end(); ++it) std::cout << it.key() << "\t" << it.value().dump() << "\n";
    return 0;
}

int cmd_reduce(const std::string& file, bool trace) {
    auto d = parse_derivation(slurp(file));
    const std::size_t r = rank(d);
    json log = json::array();
    bool ok = true;
    // depth-first over proj branches; labels record the branch taken
    std::vector<std::pair<std::string, Derivation>> work{{"", d}};
    std::vector<std::string> finals;
    while (!work.empty()) {
        auto [label, cur] = work.back();
        work.pop_back();
        auto site = first_redex(cur->conclusion.subject);
        auto w = weight(cur, r);
        if (!site) {
            finals.push_back(print_term(cur->conclusion.subject));
            if (trace) log.push_back({{"branch", label}, {"weight", w.str()}, {"subject", finals.back()}, {"normal", true}});
            continue;
        }
        auto [a, b] = subject_reduce(cur, *site, r);
        check_derivation(a);
        bool split = site->kind == RedexKind::Proj;
        if (split) check_derivation(b);
        bool dec = weight(a, r) < w && (!split || weight(b, r) < w);
        ok = ok && dec;
        if (trace)
            log.push_back({{"branch", label}, {"weight", w.str()}, {"redex", to_string(site->kind)},
                           {"subject", print_term(cur->conclusion.subject)}, {"decreasing", dec}});
        if (split) {
            work.push_back({label + "1", b});
            work.push_back({label + "0", a});
        } else {
            work.push_back({label, a});
        }
    }
    if (g_json) {
        emit({{"r", r}, {"weights_decrease", ok}, {"normal_forms", finals}, {"trace", log}});
    } else {
        for (const auto& e : log) {
            std::cout << (e["branch"].get<std::string>().empty() ? "-" : e["branch"].get<std::string>()) << "\tw=" << e["weight"].get<std::string>()
                      << "\t" << e["subject"].get<std::string>();
            if (e.contains("redex")) std::cout << "\t[" << e["redex"].get<std::string>() << "]";
            std::cout << "\n";
        }
        std::cout << "# r = " << r << ", weights " << (ok ? "strictly decrease" : "DO NOT decrease") << "\n";
    }
    return ok ? 0 : 1;
}

int cmd_confluence(const std::string& file, std::size_t limit, std::size_t fuel, bool strict) {
    auto e = parse_term(slurp(file), strict);
    auto rep = confluence_oracle(e.term, fuel ? fuel : 10000, limit);
    json ds = json::array();
    for (const auto& d : rep.distributions) ds.push_back(json::parse(format_distribution(d)));
    if (g_json) {
        emit({{"agree", rep.agree}, {"complete", rep.complete}, {"states", rep.states}, {"distributions", ds}});
    } else {
        std::cout << (rep.complete ? (rep.agree ? "agree" : "DISAGREE") : "inconclusive (limit reached)") << ", "
                  << rep.states << " states, " << rep.distributions.size() << " distinct distribution(s)\n";
        for (const auto& d : ds) std::cout << d.dump() << "\n";
    }
    if (!rep.complete) return fail("limit-exceeded", "exploration truncated at " + std::to_string(limit) + " states", 1);
    return rep.agree ? 0 : 1;
}

struct CompileArgs {
    std::string spec, time = "x", space = "x", emit = "term";
    bool verdict = false;
};

int cmd_compile(const CompileArgs& a) {
    auto spec = parse_ptm(slurp(a.spec));
    auto c = ptm_compile(spec, Polynomial::parse(a.time), Polynomial::parse(a.space),
                         a.verdict ? Extraction::Verdict : Extraction::Tape);
    if (a.emit == "derivation") {
        std::cout << derivation_to_json(c.program.derivation) << "\n";
    } else if (g_json) {
        emit({{"term", print_term(c.program.term)}, {"type", print_type(c.program.type)}, {"bangs", c.bangs},
              {"size", size(c.program.term)}});
    } else {
        std::cout << print_term(c.program.term) << "\n# : " << print_type(c.program.type) << "\n";
    }
    return 0;
}

int cmd_oracle(const std::string& file, const std::string& input, std::size_t steps, std::size_t tape) {
    auto spec = parse_ptm(slurp(file));
    auto out = ptm_run(spec, input, steps, tape);
    json j = {{"tapes", tapes_json(out.tapes)}, {"verdicts", verdicts_json(out.verdicts)}, {"configurations", out.configurations}};
    if (g_json) {
        emit(j);
    } else {
        for (const auto& row : j["tapes"]) std::cout << row["prob"].get<std::string>() << "\t" << row["tape"].get<std::string>() << "\n";
        std::cout << "# accept " << rational_string(out.verdicts.accept) << ", reject " << rational_string(out.verdicts.reject) << "\n";
    }
    return 0;
}

struct CompareArgs {
    std::string spec, time, space;
    std::vector<std::string> inputs;
    std::size_t steps = 0, tape = 0;
    bool verdict = false;
};

int cmd_compare(const CompareArgs& a) {
    auto spec = parse_ptm(slurp(a.spec));
    if (a.time.empty() != a.space.empty()) throw Error("bad-arguments", "give both --time-poly and --space-poly");
    if (a.time.empty() && (!a.steps || !a.tape)) throw Error("bad-arguments", "give --steps/--tape or --time-poly/--space-poly");
    auto P = a.time.empty() ? constant(a.steps) : Polynomial::parse(a.time);
    auto Q = a.space.empty() ? constant(a.tape) : Polynomial::parse(a.space);
    auto c = ptm_compile(spec, P, Q, a.verdict ? Extraction::Verdict : Extraction::Tape);
    bool all = true;
    json rows = json::array();
    for (const auto& in : a.inputs) {
        auto oracle = ptm_run(spec, in, P(in.size()), Q(in.size()));
        EvalOptions o;
        o.memo = true;
        auto r = evaluate(apply_compiled(c, in), o);
        bool same = true;
        json got;
        if (a.verdict) {
            Verdicts v;
            for (const auto& [k, e] : r.distribution.entries()) {
                auto b = decode_bool(e.term);
                if (!b) throw Error("decode-failed", "result is not a boolean: " + print_term(e.term));
                (*b == 0 ? v.accept : v.reject) += e.prob;
            }
            same = v.accept == oracle.verdicts.accept && v.reject == oracle.verdicts.reject;
            got = verdicts_json(v);
            rows.push_back({{"input", in}, {"equal", same}, {"term", got}, {"oracle", verdicts_json(oracle.verdicts)}});
        } else {
            std::map<std::string, Rational> tapes;
            for (const auto& [k, e] : r.distribution.entries()) {
                auto s = decode_string(e.term);
                if (!s) throw Error("decode-failed", "result is not a string: " + print_term(e.term));
                tapes[*s] += e.prob;
            }
            same = tapes == oracle.tapes;
            rows.push_back({{"input", in}, {"equal", same}, {"term", tapes_json(tapes)}, {"oracle", tapes_json(oracle.tapes)}});
        }
        all = all && same;
    }
    if (g_json) {
        emit({{"equal", all}, {"inputs", rows}});
    } else {
        for (const auto& row : rows)
            std::cout << (row["equal"].get<bool>() ? "equal   " : "DIFFERENT") << "\t'" << row["input"].get<std::string>()
                      << "'\tterm " << row["term"].dump() << "\toracle " << row["oracle"].dump() << "\n";
    }
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"psta: probabilistic soft type assignment toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_flag("--json", g_json, "machine-readable output (results and errors)");

    EvalArgs ea;
    auto* eval = app.add_subcommand("eval", "evaluate a term to its exact surface distribution");
    eval->add_option("file", ea.file, "term file ('-' for stdin)")->required();
    eval->add_option("--strategy", ea.strategy, "leftmost | rightmost | random:SEED | site:K");
    eval->add_option("--fuel", ea.fuel, "steps allowed per branch (default $PSTA_FUEL or 10^6)");
    eval->add_flag("--strict", ea.strict, "reject terms that are not s-linear");
    eval->add_flag("--memo", ea.memo, "share results between identical states");
    eval->add_flag("--unicode", ea.unicode, "print terms with λ ⟨ ⟩");

    std::string dfile, dtype;
    std::vector<std::string> dctx;
    bool dstrict = false;
    auto* derive = app.add_subcommand("derive", "build a derivation for a term at a type (JSON)");
    derive->add_option("file", dfile)->required();
    derive->add_option("--type", dtype, "goal type, e.g. 'B' or '!1 -o 1'")->required();
    derive->add_option("--context", dctx, "assumption name:type (repeatable)");
    derive->add_flag("--strict", dstrict);

    std::string cfile;
    auto* check = app.add_subcommand("check", "validate a derivation");
    check->add_option("derivation", cfile)->required();

    std::string mfile;
    std::size_t mr = 0;
    auto* met = app.add_subcommand("metrics", "rank, depth and weight of a derivation");
    met->add_option("derivation", mfile)->required();
    met->add_option("--r", mr, "weight parameter (default: the rank)");

    std::string rfile;
    bool rtrace = false;
    auto* red = app.add_subcommand("reduce", "iterate subject reduction to normal form, logging weights");
    red->add_option("derivation", rfile)->required();
    red->add_flag("--trace", rtrace, "log every step");

    std::string kfile;
    std::size_t klimit = 200000, kfuel = 0;
    bool kstrict = false;
    auto* conf = app.add_subcommand("confluence", "explore every redex choice and compare distributions");
    conf->add_option("file", kfile)->required();
    conf->add_option("--limit", klimit, "state limit");
    conf->add_option("--fuel", kfuel, "steps allowed per path");
    conf->add_flag("--strict", kstrict);

    CompileArgs ca;
    auto* comp = app.add_subcommand("compile-ptm", "compile a machine into a typed term");
    comp->add_option("spec", ca.spec)->required();
    comp->add_option("--time-poly", ca.time, "time bound p(n)");
    comp->add_option("--space-poly", ca.space, "space bound q(n)");
    comp->add_option("--emit", ca.emit, "term | derivation")->check(CLI::IsMember({"term", "derivation"}));
    comp->add_flag("--verdict", ca.verdict, "extract accept/reject instead of the tape");

    std::string ofile, oinput;
    std::size_t osteps = 0, otape = 0;
    auto* orc = app.add_subcommand("oracle", "run a machine exactly over all coin outcomes");
    orc->add_option("spec", ofile)->required();
    orc->add_option("--input", oinput, "input bits")->required();
    orc->add_option("--steps", osteps)->required();
    orc->add_option("--tape", otape)->required();

    CompareArgs cm;
    auto* cmp = app.add_subcommand("compare", "compiled term vs. oracle; exit 0 iff exactly equal");
    cmp->add_option("spec", cm.spec)->required();
    cmp->add_option("--input", cm.inputs, "input bits (repeatable)")->required();
    cmp->add_option("--steps", cm.steps, "constant time bound");
    cmp->add_option("--tape", cm.tape, "constant space bound");
    cmp->add_option("--time-poly", cm.time);
    cmp->add_option("--space-poly", cm.space);
    cmp->add_flag("--verdict", cm.verdict, "compare accept/reject instead of tapes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        if (g_json) return fail("usage", e.what(), 3);
        return app.exit(e) ? 3 : 0;
    }

    try {
        if (*eval) return cmd_eval(ea);
        if (*derive) return cmd_derive(dfile, dtype, dctx, dstrict);
        if (*check) return cmd_check(cfile);
        if (*met) return cmd_metrics(mfile, mr);
        if (*red) return cmd_reduce(rfile, rtrace);
        if (*conf) return cmd_confluence(kfile, klimit, kfuel, kstrict);
        if (*comp) return cmd_compile(ca);
        if (*orc) return cmd_oracle(ofile, oinput, osteps, otape);
        if (*cmp) return cmd_compare(cm);
    } catch (const FuelExhausted& e) {
        return fail(e.code(), e.what(), 2);
    } catch (const CheckError& e) {
        return fail(e.code(), e.what(), 1);
    } catch (const Error& e) {
        return fail(e.code(), e.what(), 3);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 4);
    }
    return 4;
}
