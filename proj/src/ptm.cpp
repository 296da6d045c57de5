#include "psta/ptm.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <tuple>

namespace psta {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& msg) { throw Error("schema-error", path + ": " + msg); }

bool is_bits(const std::string& s, std::size_t width) {
    return s.size() == width && s.find_first_not_of("01") == std::string::npos;
}

std::string all_bits(std::size_t i, std::size_t width) {
    std::string s(width, '0');
    for (std::size_t b = 0; b < width; ++b)
        if (i >> (width - 1 - b) & 1) s[b] = '1';
    return s;
}

const json& field(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) schema(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) schema(path, "missing field \"" + key + "\"");
    return *it;
}

std::string bits_field(const json& j, const std::string& key, const std::string& path, std::size_t width) {
    const auto& v = field(j, key, path);
    if (!v.is_string() || !is_bits(v.get<std::string>(), width))
        schema(path + "." + key, "expected a bit string of length " + std::to_string(width));
    return v.get<std::string>();
}

int bit_field(const json& j, const std::string& key, const std::string& path) {
    const auto& v = field(j, key, path);
    if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) schema(path + "." + key, "expected 0 or 1");
    return v.get<int>();
}

std::vector<TransitionRow> rows_field(const json& j, const std::string& key, std::size_t width) {
    std::string path = "$." + key;
    const auto& v = field(j, key, "$");
    if (!v.is_array()) schema(path, "expected an array");
    std::vector<TransitionRow> rows;
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::string p = path + "[" + std::to_string(i) + "]";
        TransitionRow r;
        r.state = bits_field(v[i], "state", p, width);
        r.read = bit_field(v[i], "read", p);
        r.next = bits_field(v[i], "next", p, width);
        r.write = bit_field(v[i], "write", p);
        const auto& m = field(v[i], "move", p);
        if (!m.is_string() || (m.get<std::string>() != "L" && m.get<std::string>() != "R"))
            schema(p + ".move", "expected \"L\" or \"R\"");
        r.move = m.get<std::string>()[0];
        rows.push_back(r);
    }
    return rows;
}

std::vector<std::string> states_field(const json& j, const std::string& key, std::size_t width) {
    const auto& v = field(j, key, "$");
    if (!v.is_array()) schema("$." + key, "expected an array");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_string() || !is_bits(v[i].get<std::string>(), width))
            schema("$." + key + "[" + std::to_string(i) + "]", "expected a bit string of length " + std::to_string(width));
        out.push_back(v[i].get<std::string>());
    }
    return out;
}

json rows_json(const std::vector<TransitionRow>& rows) {
    json a = json::array();
    for (const auto& r : rows)
        a.push_back({{"state", r.state}, {"read", r.read}, {"next", r.next}, {"write", r.write}, {"move", std::string(1, r.move)}});
    return a;
}

} // namespace

TransitionTable transition_table(const std::vector<TransitionRow>& rows, std::size_t width) {
    TransitionTable t;
    for (const auto& r : rows)
        if (!t.emplace(std::make_pair(r.state, r.read), r).second)
            throw Error("non-total-table", "duplicate row for state " + r.state + " reading " + std::to_string(r.read));
    for (std::size_t i = 0; i < (std::size_t{1} << width); ++i)
        for (int b = 0; b < 2; ++b)
            if (!t.count({all_bits(i, width), b}))
                throw Error("non-total-table", "no row for state " + all_bits(i, width) + " reading " + std::to_string(b));
    return t;
}

void validate(const PtmSpec& spec) {
    if (spec.state_width == 0) throw Error("schema-error", "$.state_width: must be at least 1");
    if (!is_bits(spec.initial, spec.state_width)) throw Error("schema-error", "$.initial: bad state");
    for (const auto& a : spec.accepting)
        if (std::find(spec.rejecting.begin(), spec.rejecting.end(), a) != spec.rejecting.end())
            throw Error("schema-error", "state " + a + " is both accepting and rejecting");
    transition_table(spec.delta0, spec.state_width);
    transition_table(spec.delta1, spec.state_width);
}

PtmSpec parse_ptm(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error("schema-error", std::string("$: invalid JSON: ") + e.what());
    }
    PtmSpec s;
    const auto& w = field(j, "state_width", "$");
    if (!w.is_number_unsigned() || w.get<std::size_t>() == 0 || w.get<std::size_t>() > 8)
        schema("$.state_width", "expected an integer in 1..8");
    s.state_width = w.get<std::size_t>();
    s.initial = bits_field(j, "initial", "$", s.state_width);
    s.accepting = states_field(j, "accepting", s.state_width);
    s.rejecting = states_field(j, "rejecting", s.state_width);
    s.delta0 = rows_field(j, "delta0", s.state_width);
    s.delta1 = rows_field(j, "delta1", s.state_width);
    validate(s);
    return s;
}

std::string ptm_to_json(const PtmSpec& s) {
    json j;
    j["state_width"] = s.state_width;
    j["initial"] = s.initial;
    j["accepting"] = s.accepting;
    j["rejecting"] = s.rejecting;
    j["delta0"] = rows_json(s.delta0);
    j["delta1"] = rows_json(s.delta1);
    return j.dump(2);
}

OutputDistribution ptm_run(const PtmSpec& spec, const std::string& input, std::size_t steps, std::size_t tape_len) {
    if (input.find_first_not_of("01") != std::string::npos) throw Error("bad-input", "input must be a bit string");
    if (input.size() > tape_len) throw Error("tape-overflow", "input longer than the tape");
    const TransitionTable t0 = transition_table(spec.delta0, spec.state_width);
    const TransitionTable t1 = transition_table(spec.delta1, spec.state_width);

    using Config = std::tuple<std::string, std::size_t, std::string>; // state, head, tape
    std::map<Config, Rational> cur;
    std::string tape = input + std::string(tape_len - input.size(), '0');
    cur[{spec.initial, 0, tape}] = 1;
    OutputDistribution out;
    out.configurations = 1;
    const Rational half(1, 2);
    for (std::size_t step = 0; step < steps; ++step) {
        std::map<Config, Rational> next;
        for (const auto& [c, p] : cur) {
            const auto& [state, head, tp] = c;
            int read = head < tape_len ? tp[head] - '0' : 0;
            for (const TransitionTable* t : {&t0, &t1}) {
                const auto& row = t->at({state, read});
                std::string nt = tp;
                if (head < tape_len) nt[head] = static_cast<char>('0' + row.write);
                else if (row.write != 0)
                    throw Error("tape-overflow", "write past the last cell (step " + std::to_string(step + 1) + ")");
                std::size_t nh = head;
                if (row.move == 'L') nh = head == 0 ? 0 : head - 1;
                else if (++nh > tape_len)
                    throw Error("tape-overflow", "head moved past the tape end (step " + std::to_string(step + 1) + ")");
                next[{row.next, nh, nt}] += p * half;
            }
        }
        cur = std::move(next);
        out.configurations = std::max(out.configurations, cur.size());
    }
    auto member = [](const std::vector<std::string>& v, const std::string& s) {
        return std::find(v.begin(), v.end(), s) != v.end();
    };
    for (const auto& [c, p] : cur) {
        const auto& [state, head, tp] = c;
        out.tapes[tp] += p;
        if (member(spec.accepting, state)) out.verdicts.accept += p;
        else if (member(spec.rejecting, state)) out.verdicts.reject += p;
        else throw Error("unhalted-path", "a path is in non-final state " + state + " after " + std::to_string(steps) + " steps");
    }
    return out;
}

bool recognizes_with_error(const std::map<std::string, Verdicts>& results, const std::map<std::string, bool>& membership,
                           const Rational& eps) {
    for (const auto& [x, v] : results) {
        auto m = membership.find(x);
        if (m == membership.end()) throw Error("missing-membership", "no membership for input '" + x + "'");
        if (m->second ? v.accept < 1 - eps : v.reject < 1 - eps) return false;
    }
    return true;
}

bool accepts_by_majority(const std::map<std::string, Verdicts>& results, const std::map<std::string, bool>& membership) {
    for (const auto& [x, v] : results) {
        auto m = membership.find(x);
        if (m == membership.end()) throw Error("missing-membership", "no membership for input '" + x + "'");
        if (m->second ? v.accept < v.reject : v.reject < v.accept) return false;
    }
    return true;
}

} // namespace psta
