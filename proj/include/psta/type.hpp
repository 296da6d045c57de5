#pragma once

#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace psta {

// Meta is a unification placeholder used only by the derivation builder;
// it never survives into a finished derivation.
enum class TypeKind { Var, Imp, With, Forall, Bang, Meta };

struct TypeNode;
using Type = std::shared_ptr<const TypeNode>;

struct TypeNode {
    TypeKind kind;
    std::string name; // Var name / Forall binder
    int meta = -1;
    std::vector<Type> kids; // Imp: [antecedent, consequent]; With: [l, r]; Forall/Bang: [body]
};

Type tvar(std::string name);
Type imp(Type a, Type b);
Type with(Type a, Type b);
Type forall(std::string a, Type body);
Type tbang(Type body);
Type tmeta(int id);
Type tbangs(std::size_t n, Type t);

// σ1 ⊸ ... ⊸ σn ⊸ A
Type imps(const std::vector<Type>& args, Type result);

std::set<std::string> type_free_vars(const Type& t);
Type type_substitute(const Type& t, const std::string& a, const Type& repl);

std::size_t type_size(const Type& t);

bool is_linear(const Type& t); // no top-level !
bool is_well_formed(const Type& t);
bool is_forall_bang_lazy(const Type& t);
bool has_meta(const Type& t);

std::string type_key(const Type& t);
bool type_equal(const Type& a, const Type& b); // up to renaming of bound variables

// 𝟏 = ∀α.α⊸α
Type unit_type();

} // namespace psta
