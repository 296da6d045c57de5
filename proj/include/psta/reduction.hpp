#pragma once

#include "psta/term.hpp"

#include <string>
#include <optional>
#include <vector>

namespace psta {

enum class RedexKind { Beta, BangBeta, Proj, Copy };

const char* to_string(RedexKind k);

struct RedexSite {
    std::vector<int> path; // child indices from the root, through surface positions only
    RedexKind kind;

    bool operator==(const RedexSite&) const = default;
};

// One successor, or exactly two for proj.
struct StepResult {
    std::vector<Term> successors;
};

// Surface redexes in pre-order (leftmost-outermost first).
std::vector<RedexSite> find_redexes(const Term& t);
// The leftmost-outermost site (first element of find_redexes), if any.
std::optional<RedexSite> first_redex(const Term& t);

// The redex kind rooted at t, if t itself is a redex.
bool redex_at_root(const Term& t, RedexKind& kind);

StepResult step(const Term& t, const RedexSite& site);

bool is_snf(const Term& t);

} // namespace psta
