#pragma once

#include "psta/encodings.hpp"

#include <cstdint>
#include <vector>

namespace psta {

struct GenOptions {
    std::size_t max_size = 30;  // |M| of the elaborated subject
    std::size_t max_proj = 2;   // proj sites in the subject
    std::size_t max_depth = 4;  // nesting of the generator's productions
};

// Distinct closed typable terms at 𝟏, 𝐁 and 𝐁⊗𝐁, each with a checked
// derivation from the assigner. Deterministic in `seed`.
std::vector<Built> generate_typed(std::size_t count, std::uint64_t seed, const GenOptions& opts = {});

// Every closed s-linear value (variables, λx, application, pairs; no
// β-redex) of size ≤ max_size, one representative per α-class.
std::vector<Term> closed_values(std::size_t max_size);

// The candidates of closed_values(max_size) that receive a derivation of
// ⊢ V : type.
std::vector<Built> value_inhabitants(const Type& type, std::size_t max_size);

} // namespace psta
