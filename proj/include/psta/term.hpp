#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace psta {

enum class TermKind { Var, Lam, BangLam, App, Bang, Der, Pair, Proj, Copy };

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

// Raw terms. Child layout:
//   Lam/BangLam/Bang/Der/Proj: [body]
//   App: [fun, arg]      Pair: [left, right]
//   Copy: [bound value V, scrutinee, left branch, right branch]
// `name` is the variable or binder (first copy binder), `name2` the second copy binder.
struct TermNode {
    TermKind kind;
    std::string name;
    std::string name2;
    std::vector<Term> kids;
    std::size_t size = 1;
};

Term var(std::string name);
Term lam(std::string x, Term body);
Term bang_lam(std::string x, Term body);
Term app(Term f, Term a);
Term bang(Term body);
Term der(Term body);
Term pair(Term l, Term r);
Term proj(Term body);
Term copy(Term bound, Term scrutinee, std::string x1, std::string x2, Term l, Term r);

// conveniences: f a1 ... an, \x1...\xn.body, !^n t, d^n t
Term apps(Term f, const std::vector<Term>& args);
Term lams(const std::vector<std::string>& xs, Term body);
Term bangs(std::size_t n, Term t);
Term ders(std::size_t n, Term t);

Term with_kids(const Term& t, std::vector<Term> kids);

std::set<std::string> free_vars(const Term& t);
bool occurs_free(const Term& t, const std::string& x);
std::size_t count_free(const Term& t, const std::string& x);
std::size_t size(const Term& t);

// nullopt when every λx / copy binder is s-linear; otherwise a description
// naming the offending binder.
std::optional<std::string> s_linearity_violation(const Term& t);
bool is_s_linear(const Term& t);

Term substitute(const Term& t, const std::string& x, const Term& arg);
Term substitute_many(const Term& t, const std::map<std::string, Term>& sigma);
Term surface_substitute(const Term& t, const std::string& x, const Term& arg);

bool is_value(const Term& t);

std::string canonical_key(const Term& t);
bool alpha_equal(const Term& a, const Term& b);

// Fresh names look like base#n; printers strip the suffix again.
std::string fresh_name(const std::string& base);
std::string base_name(const std::string& name);

// Subterm addressed by a child-index path.
Term subterm_at(const Term& t, const std::vector<int>& path);
Term replace_at(const Term& t, const std::vector<int>& path, const Term& repl);

} // namespace psta
