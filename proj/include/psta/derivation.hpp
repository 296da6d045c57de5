#pragma once

#include "psta/error.hpp"
#include "psta/reduction.hpp"
#include "psta/term.hpp"
#include "psta/type.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace psta {

using Context = std::map<std::string, Type>;

struct Judgment {
    Context context;
    Term subject;
    Type type;
};

enum class Rule { Ax, ImpIl, ImpIe, ImpE, WithI, WithE, Sp, M, ForallI, ForallE };

const char* to_string(Rule r);
Rule rule_from_string(const std::string& s);

// Rule-specific data; only the fields relevant to the rule are meaningful.
struct Payload {
    std::string var;                  // ax: variable; impIl/impIe: binder; m: the new variable x
    Type type;                        // ax: A; m: σ of the merged assumptions; forallE: instance B
    std::vector<std::string> merged;  // m: x1..xn
    std::vector<std::pair<std::string, std::string>> renaming; // sp: premise x_i -> conclusion y_i
    std::string eigen, bound;         // forallI: γ and the displayed binder α
    std::string binder1, binder2;     // withI (copy form)
    bool bare = false;                // withI special case: closed pair, two premises
};

struct DerivationNode;
using Derivation = std::shared_ptr<const DerivationNode>;

// withI premises (copy form): [Δ ⊢ N:C, x1:C ⊢ M1:C1, x2:C ⊢ M2:C2, ⊢ V:C]
struct DerivationNode {
    Rule rule;
    Payload payload;
    std::vector<Derivation> premises;
    Judgment conclusion;
};

class CheckError : public Error {
public:
    CheckError(std::string code, std::string path, const std::string& msg)
        : Error(std::move(code), path + ": " + msg), path(std::move(path)) {}
    std::string path;
};

// Smart constructors: compute the conclusion from premises and payload and
// enforce every side condition (throwing CheckError on violation).
Derivation make_ax(const std::string& x, const Type& a);
Derivation make_imp_il(const Derivation& d, const std::string& x);
Derivation make_imp_ie(const Derivation& d, const std::string& x);
Derivation make_imp_e(const Derivation& f, const Derivation& a);
Derivation make_with_i(const Derivation& n, const Derivation& m1, const Derivation& m2, const Derivation& v,
                       const std::string& x1, const std::string& x2);
Derivation make_pair(const Derivation& m1, const Derivation& m2);
Derivation make_with_e(const Derivation& d);
Derivation make_sp(const Derivation& d, const std::vector<std::pair<std::string, std::string>>& renaming);
Derivation make_m(const Derivation& d, const std::string& x, const std::vector<std::string>& merged, const Type& sigma);
Derivation make_forall_i(const Derivation& d, const std::string& eigen, const std::string& bound = {});
Derivation make_forall_e(const Derivation& d, const Type& instance);

// Same rule and payload over new premises.
Derivation rebuild(const Derivation& node, std::vector<Derivation> premises);

// Unchecked node with a stored conclusion (parsers, negative tests).
Derivation make_raw(Rule rule, Payload payload, std::vector<Derivation> premises, Judgment conclusion);

// Validates every node; returns the root conclusion.
Judgment check_derivation(const Derivation& d);

struct Metrics {
    std::size_t rank;
    std::size_t depth;
    boost::multiprecision::cpp_int weight;
};

std::size_t rank(const Derivation& d);
std::size_t depth(const Derivation& d);
boost::multiprecision::cpp_int weight(const Derivation& d, std::size_t r);
Metrics metrics(const Derivation& d, std::size_t r);
std::size_t node_count(const Derivation& d);

// Rank contributed by a single m or sp node: merged / renamed variables that
// occur free in the premise subject.
std::size_t local_rank(const DerivationNode& n);

struct Peeled {
    Derivation core;
    std::vector<Derivation> suffix; // trailing ∀I/∀E/m nodes, innermost first
};
Peeled generation_peel(const Derivation& d);

// Re-applies the trailing nodes of a peel on top of a new core.
Derivation reapply(const std::vector<Derivation>& suffix, Derivation core);

// α-renames every bound term variable and eigenvariable to a fresh name;
// `rename` maps free variables of the conclusion (default: identity).
Derivation freshen(const Derivation& d, const std::map<std::string, std::string>& rename = {});
// Substitutes free type variables throughout (used for ∀I/∀E cancellation).
Derivation type_substitute_derivation(const Derivation& d, const std::string& a, const Type& b);

Derivation weighted_substitute(const Derivation& d1, const std::string& x, const Derivation& d2, std::size_t r);

std::pair<Derivation, Derivation> subject_reduce(const Derivation& d, const RedexSite& site, std::size_t r);

// Every withI bound-value premise ⊢ V:C with |V| and |C|.
struct ValueBound {
    std::size_t value_size;
    std::size_t type_size;
};
std::vector<ValueBound> with_value_bounds(const Derivation& d);

} // namespace psta
