#pragma once

#include "psta/error.hpp"
#include "psta/sugar.hpp"
#include "psta/term.hpp"
#include "psta/type.hpp"

#include <string>

namespace psta {

// Syntax errors carry a 1-based line/column.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t col, const std::string& msg)
        : Error("syntax-error", std::to_string(line) + ":" + std::to_string(col) + ": " + msg), line(line), col(col) {}
    std::size_t line, col;
};

// ASCII syntax:
//   \x y. M   \!x. M   M N   !M   d(M)   <M, N>   proj(M)
//   copy^{V} N as x, y in <P, Q>
// sugar: M * N (tensor), let M be x * y in N, let M be I in N,
//        if C then M else N, I, (M : A)
Sugared parse_sugared(const std::string& text);

// Parses and elaborates; with `require_s_linear` a binder violating
// s-linearity is reported with its location ("not-s-linear").
Elaborated parse_term(const std::string& text, bool require_s_linear = true);

// Types: forall a. A, A -o B, A & B, A * B (tensor), !A, 1, B, N_i, S_i, (A)
Type parse_type(const std::string& text);

// Bound names are tidied (fresh-name suffixes dropped where that is safe).
std::string print_term(const Term& t, bool unicode = false);
std::string print_type(const Type& t, bool unicode = false);

} // namespace psta
