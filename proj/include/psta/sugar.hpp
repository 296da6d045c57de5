#pragma once

#include "psta/assign.hpp"
#include "psta/term.hpp"
#include "psta/type.hpp"

#include <memory>
#include <string>
#include <vector>

namespace psta {

// Terms with the derived connectives (⊗, 𝟏, if/then/else) and type
// annotations. elaborate() turns them into raw terms plus the hint table the
// derivation builder needs.
enum class SugarKind { Var, Lam, BangLam, App, Bang, Der, Pair, Proj, Copy, Tensor, LetTensor, LetUnit, Unit, If, Annot, Embed };

struct SugarNode;
using Sugared = std::shared_ptr<const SugarNode>;

struct SugarNode {
    SugarKind kind;
    std::string name, name2;           // binders (Lam/BangLam/Copy/Var name)
    std::vector<std::string> binders;  // LetTensor; a leading '!' marks a bang binder
    std::vector<Sugared> kids;         // Copy: [V, N, P, Q]; LetTensor/LetUnit: [scrutinee, body]; If: [c, M, N, eraser?]
    Type type;                         // Annot
    Term raw;                          // Embed
};

namespace sg {
Sugared var(const std::string& x);
Sugared lam(const std::string& x, Sugared body);
Sugared lams(const std::vector<std::string>& xs, Sugared body);
Sugared bang_lam(const std::string& x, Sugared body);
Sugared app(Sugared f, Sugared a);
Sugared apps(Sugared f, const std::vector<Sugared>& args);
Sugared bang(Sugared t);
Sugared bangs(std::size_t n, Sugared t);
Sugared der(Sugared t);
Sugared ders(std::size_t n, Sugared t);
Sugared pair(Sugared l, Sugared r);
Sugared proj(Sugared t);
Sugared copy(Sugared v, Sugared n, const std::string& x1, const std::string& x2, Sugared p, Sugared q);
Sugared tensor(const std::vector<Sugared>& parts);
Sugared let_tensor(Sugared scrutinee, const std::vector<std::string>& binders, Sugared body);
Sugared let_unit(Sugared scrutinee, Sugared body);
Sugared unit();
// π1(c M N), erasing the discarded branch with `eraser` (default: the boolean eraser)
Sugared if_(Sugared c, Sugared m, Sugared n, Sugared eraser = nullptr);
Sugared annot(Sugared t, Type ty);
Sugared embed(Term t);
// M ∘ N = λz. M (N z)
Sugared compose(Sugared m, Sugared n);
Sugared compose_all(const std::vector<Sugared>& fs); // identity when empty
} // namespace sg

struct Elaborated {
    Term term;
    HintTable hints;
};

Elaborated elaborate(const Sugared& s);

// Second-order encodings of the derived types.
Type tensor_type(const std::vector<Type>& parts); // ∀α.(A1⊸…⊸An⊸α)⊸α
Type bool_type();                                  // 𝐁 = ∀α.α⊸α⊸α⊗α
Type bool_tuple_type(std::size_t n);               // 𝐁^n (𝐁 itself for n = 1)
Type nat_type(std::size_t i);                      // 𝐍_i = ∀α.!^i(α⊸α)⊸α⊸α
Type string_type(std::size_t i);                   // 𝐒_i = ∀α.!^i(𝐁⊸α⊸α)⊸α⊸α

} // namespace psta
