#pragma once

#include "psta/derivation.hpp"

#include <map>

namespace psta {

// Per-node type annotations. Meta placeholders in a hint (tmeta(k)) are
// template variables, instantiated afresh at every use.
using HintTable = std::map<const TermNode*, Type>;

// Builds an explicit derivation of ctx ⊢ t : goal.
//
// Bidirectional: abstractions are checked against their goal, applications
// synthesise the function type and solve ∀E instances by first-order
// unification; banged variables get one m per binder (one merged assumption
// per occurrence) and boxes get one sp. Unsolved placeholders default to 𝟏.
// The result has been re-checked by check_derivation. Throws Error
// ("assign-failed") when no derivation of that shape exists.
Derivation assign(const Term& t, const Type& goal, const Context& ctx = {}, const HintTable& hints = {});

} // namespace psta
