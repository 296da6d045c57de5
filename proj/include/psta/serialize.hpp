#pragma once

#include "psta/derivation.hpp"
#include "psta/eval.hpp"

#include <string>

namespace psta {

// JSON forms. Terms and types are structured objects so that binder and
// eigenvariable names survive exactly; every node also carries a "text"
// rendering for humans, ignored on input.
//
// term:  {"var":x} {"lam":x,"body":t} {"bang_lam":x,"body":t} {"app":[f,a]}
//        {"bang":t} {"der":t} {"pair":[l,r]} {"proj":t}
//        {"copy":{"value":v,"scrutinee":n,"x1":..,"x2":..,"left":p,"right":q}}
// type:  {"tvar":a} {"imp":[a,b]} {"with":[a,b]} {"forall":a,"body":t} {"bang":t}
// node:  {"rule":..., payload fields..., "conclusion":{"context":{x:type},
//         "subject":term,"type":type}, "premises":[node...]}
std::string derivation_to_json(const Derivation& d, int indent = 2);

// Schema problems raise schema-error with a JSON path; nodes without a
// conclusion are rebuilt by the smart constructors, the rest are re-checked
// (CheckError carries the node path, e.g. $.premises[0]).
Derivation parse_derivation(const std::string& json_text);

// [{"term":..., "prob":"num/den"}] by descending probability, then term text.
std::string format_distribution(const SurfaceDistribution& d, int indent = -1);

// {"error":{"code":...,"message":...}}
std::string error_json(const std::string& code, const std::string& message);

} // namespace psta
