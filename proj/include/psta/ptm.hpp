#pragma once

#include "psta/error.hpp"
#include "psta/eval.hpp"

#include <map>
#include <string>
#include <vector>

namespace psta {

// Probabilistic Turing machines over {0,1}: at every step a fair coin picks
// δ0 or δ1. States are bit strings of length state_width.
struct TransitionRow {
    std::string state;
    int read = 0;
    std::string next;
    int write = 0;
    char move = 'R'; // 'L' or 'R'
};

struct PtmSpec {
    std::size_t state_width = 1;
    std::string initial;
    std::vector<std::string> accepting, rejecting;
    std::vector<TransitionRow> delta0, delta1;
};

// (state, read) -> row; throws non-total-table unless total on {0,1}^k × {0,1}
using TransitionTable = std::map<std::pair<std::string, int>, TransitionRow>;
TransitionTable transition_table(const std::vector<TransitionRow>& rows, std::size_t state_width);
void validate(const PtmSpec& spec);

PtmSpec parse_ptm(const std::string& json_text);
std::string ptm_to_json(const PtmSpec& spec);

struct Verdicts {
    Rational accept, reject;
};

struct OutputDistribution {
    std::map<std::string, Rational> tapes; // final tape contents
    Verdicts verdicts;
    std::size_t configurations = 0;        // peak number of merged configurations
};

// Runs exactly `steps` transitions on a tape of `tape_len` cells (head may
// rest one cell past the end, where it reads 0). Errors: tape-overflow,
// unhalted-path, non-total-table.
OutputDistribution ptm_run(const PtmSpec& spec, const std::string& input, std::size_t steps, std::size_t tape_len);

bool recognizes_with_error(const std::map<std::string, Verdicts>& results, const std::map<std::string, bool>& membership,
                           const Rational& eps);
bool accepts_by_majority(const std::map<std::string, Verdicts>& results, const std::map<std::string, bool>& membership);

} // namespace psta
