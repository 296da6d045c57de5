#pragma once

#include "psta/derivation.hpp"
#include "psta/ptm.hpp"
#include "psta/sugar.hpp"

#include <optional>
#include <string>
#include <vector>

namespace psta {

// A closed (or explicitly open) encoding together with its derivation.
struct Built {
    Sugared source; // annotated sugared form, reusable inside larger builders
    Term term;
    Derivation derivation;
    Type type;
};

// Elaborates, derives ctx ⊢ s : type and re-checks.
Built typed(const Sugared& s, const Type& type, const Context& ctx = {});

// Shapes of erasable boolean data: 𝐁 (no parts) or a flat tuple.
struct Shape {
    std::vector<Shape> parts;
    static Shape boolean() { return {}; }
    static Shape tuple(std::vector<Shape> ps) { return {std::move(ps)}; }
    static Shape bools(std::size_t k); // 𝐁^k (𝐁 itself for k = 1)
    bool is_bool() const { return parts.empty(); }
};
Type shape_type(const Shape& s);

// ---- types
Type ptm_type(std::size_t i, std::size_t k); // 𝐏𝐓𝐌^k_i
Type id_type(std::size_t i, std::size_t k);  // 𝐈𝐃^k_i
Type delta_in_type(std::size_t k);           // 𝐁^k ⊗ 𝐁 (state first)
Type delta_out_type(std::size_t k);          // 𝐁^k ⊗ 𝐁 ⊗ 𝐁 (state, written bit, move)

// ---- sugared building blocks (unannotated unless stated)
namespace enc {
Sugared boolean(int b);                                  // 0̲ = λxy.x⊗y, 1̲ = λxy.y⊗x
Sugared data(const Shape& s, const std::string& bits);   // bits in shape order
Sugared eraser(const Shape& s);                          // E_S : S ⊸ 𝟏
Sugared identity();                                      // λz.z
// if c then m else n, erasing the unused branch of shape s
Sugared if_data(Sugared c, Sugared m, Sugared n, const Shape& s);
// n copies of a boolean variable: binds `copies` around body
Sugared duplicate(const std::string& b, const std::vector<std::string>& copies, Sugared body);
// truth table over boolean variables (first = most significant); rows are data of shape s
Sugared select(const std::vector<std::string>& bits, std::vector<Sugared> rows, const Shape& s);
} // namespace enc

// ---- data
Built bool_term(int b);
Built string_term(const std::string& bits, std::size_t i);
Built numeral(std::size_t n, std::size_t i);
Built succ_term(std::size_t i);
Built add_term(std::size_t i, std::size_t j);
Built mult_term(std::size_t i, std::size_t j);
Built coerce_term(std::size_t i); // 𝐍_i ⊸ 𝐍_{i+1}
Built len_term(std::size_t i);
Built eraser_term(const Shape& s);

// Polynomials with natural coefficients; coeffs[j] is the coefficient of x^j.
struct Polynomial {
    std::vector<unsigned long> coeffs;
    static Polynomial parse(const std::string& text); // e.g. "x^2+1", "2*x + 3", "4"
    std::size_t degree() const;
    unsigned long operator()(unsigned long n) const;
    std::string to_string() const;
};

// x : !^D 𝐍 ⊢ p̲ : 𝐍_{2D+1} with D = max(deg p, min_degree).
Built poly_to_term(const Polynomial& p, const std::string& x = "x", std::size_t min_degree = 1);

// ---- machines
Built delta_encode(const std::vector<TransitionRow>& rows, std::size_t k);
Built delta_p_term(const Built& d0, const Built& d1, std::size_t k);
Built delta_p_for(const PtmSpec& spec);

// left cells are listed nearest to the head first (the reversed left part)
Built config_term(const std::string& left, const std::string& right, const std::string& state, std::size_t i);
Built decom_term(std::size_t i, std::size_t k);
Built com_term(std::size_t i, std::size_t k, const Built& delta_p);
Built tr_term(std::size_t i, std::size_t k, const Built& delta_p);
Built left_term(std::size_t i, std::size_t k);  // one left move, tape unchanged
Built write_term(std::size_t i, std::size_t k); // 𝐁 ⊸ 𝐏𝐓𝐌 ⊸ 𝐏𝐓𝐌: write and move right
Built init_term(std::size_t i, std::size_t k, const std::string& q0);
Built in_term(std::size_t i, std::size_t k);
Built ext_s_term(std::size_t i, std::size_t k);
Built ext_b_term(std::size_t i, std::size_t k, const std::vector<std::string>& accepting);

enum class Extraction { Tape, Verdict };

struct CompiledPtm {
    Built program;          // ⊢ 𝒫̲ : !^bangs 𝐒 ⊸ 𝐒_index (or ⊸ 𝐁)
    std::size_t bangs = 0;  // max(d1, d2, 1) + 1
    std::size_t index = 0;  // 2·d2 + 1
    Polynomial time, space;
};
CompiledPtm ptm_compile(const PtmSpec& spec, const Polynomial& time, const Polynomial& space,
                        Extraction e = Extraction::Tape);
// 𝒫̲ !^bangs s̲
Term apply_compiled(const CompiledPtm& c, const std::string& input);

// ---- decoders (on surface normal forms); nullopt when the shape does not match
std::optional<int> decode_bool(const Term& t);
std::optional<std::string> decode_bools(const Term& t, const Shape& s);
std::optional<std::size_t> decode_numeral(const Term& t);
std::optional<std::string> decode_string(const Term& t);

struct DecodedConfig {
    std::string left; // nearest to the head first
    std::string right;
    std::string state;
};
std::optional<DecodedConfig> decode_config(const Term& t, std::size_t k);

} // namespace psta
