#include "psta/encodings.hpp"

#include "psta/assign.hpp"

#include <algorithm>
#include <cctype>

namespace psta {

namespace {

std::string fresh(const char* base) { return fresh_name(base); }
Sugared V(const std::string& x) { return sg::var(x); }
Sugared A(Sugared f, const std::vector<Sugared>& args) { return sg::apps(std::move(f), args); }

std::vector<std::string> fresh_list(const char* base, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(fresh(base));
    return out;
}

std::vector<Sugared> vars(const std::vector<std::string>& xs) {
    std::vector<Sugared> out;
    for (const auto& x : xs) out.push_back(V(x));
    return out;
}

// a single-width state is a bare boolean, wider ones are destructured
Sugared with_state_bits(const std::string& q, std::size_t k, const std::vector<std::string>& qs, Sugared body) {
    if (k == 1) return body;
    return sg::let_tensor(V(q), qs, std::move(body));
}

std::string zeros(std::size_t n) { return std::string(n, '0'); }

Shape delta_in_shape(std::size_t k) { return Shape::tuple({Shape::bools(k), Shape::boolean()}); }
Shape delta_out_shape(std::size_t k) { return Shape::tuple({Shape::bools(k), Shape::boolean(), Shape::boolean()}); }

} // namespace

Built typed(const Sugared& s, const Type& type, const Context& ctx) {
    Built b;
    b.source = sg::annot(s, type);
    auto e = elaborate(s);
    b.term = e.term;
    b.derivation = assign(e.term, type, ctx, e.hints);
    b.type = type;
    return b;
}

Shape Shape::bools(std::size_t k) {
    if (k == 1) return boolean();
    return tuple(std::vector<Shape>(k, boolean()));
}

Type shape_type(const Shape& s) {
    if (s.is_bool()) return bool_type();
    std::vector<Type> ts;
    for (const auto& p : s.parts) ts.push_back(shape_type(p));
    return tensor_type(ts);
}

Type ptm_type(std::size_t i, std::size_t k) {
    auto a = tvar("a");
    auto aa = imp(a, a);
    return forall("a", imp(tbangs(i, imps({bool_type(), a}, a)), tensor_type({aa, aa, bool_tuple_type(k)})));
}

Type id_type(std::size_t i, std::size_t k) {
    auto a = tvar("a");
    auto aa = imp(a, a);
    auto cell = imps({bool_type(), a}, a);
    return forall("a", imp(tbangs(i, cell), tensor_type({aa, aa, cell, bool_type(), cell, bool_type(), bool_tuple_type(k)})));
}

Type delta_in_type(std::size_t k) { return shape_type(delta_in_shape(k)); }
Type delta_out_type(std::size_t k) { return shape_type(delta_out_shape(k)); }

// ---------------------------------------------------------------- blocks

namespace enc {

Sugared boolean(int b) {
    auto x = fresh("x"), y = fresh("y");
    return sg::annot(sg::lams({x, y}, b ? sg::tensor({V(y), V(x)}) : sg::tensor({V(x), V(y)})), bool_type());
}

namespace {
Sugared data_at(const Shape& s, const std::string& bits, std::size_t& pos) {
    if (s.is_bool()) {
        if (pos >= bits.size()) throw Error("width-mismatch", "not enough bits for the data shape");
        return boolean(bits[pos++] == '1');
    }
    std::vector<Sugared> parts;
    for (const auto& p : s.parts) parts.push_back(data_at(p, bits, pos));
    return sg::annot(sg::tensor(parts), shape_type(s));
}
} // namespace

Sugared data(const Shape& s, const std::string& bits) {
    std::size_t pos = 0;
    auto d = data_at(s, bits, pos);
    if (pos != bits.size()) throw Error("width-mismatch", "too many bits for the data shape");
    return d;
}

Sugared eraser(const Shape& s) {
    auto z = fresh("z");
    Sugared body;
    if (s.is_bool()) {
        // λz. let z I I be x⊗y in (let y be I in x)
        auto x = fresh("x"), y = fresh("y");
        body = sg::let_tensor(A(V(z), {sg::unit(), sg::unit()}), {x, y}, sg::let_unit(V(y), V(x)));
    } else {
        auto xs = fresh_list("x", s.parts.size());
        Sugared chain = sg::app(eraser(s.parts.back()), V(xs.back()));
        for (std::size_t j = s.parts.size() - 1; j-- > 0;)
            chain = sg::let_unit(sg::app(eraser(s.parts[j]), V(xs[j])), chain);
        body = sg::let_tensor(V(z), xs, chain);
    }
    return sg::annot(sg::lam(z, body), imp(shape_type(s), unit_type()));
}

Sugared identity() {
    auto z = fresh("z");
    return sg::lam(z, V(z));
}

Sugared if_data(Sugared c, Sugared m, Sugared n, const Shape& s) {
    return sg::if_(std::move(c), std::move(m), std::move(n), eraser(s));
}

Sugared duplicate(const std::string& b, const std::vector<std::string>& copies, Sugared body) {
    if (copies.size() < 2) throw Error("bad-sugar", "duplicate needs at least two copies");
    auto p = fresh("p"), o = fresh("o");
    Shape tup = Shape::tuple(std::vector<Shape>(copies.size(), Shape::boolean()));
    return sg::let_tensor(A(V(b), {data(tup, zeros(copies.size())), data(tup, std::string(copies.size(), '1'))}), {p, o},
                          sg::let_unit(sg::app(eraser(tup), V(o)), sg::let_tensor(V(p), copies, std::move(body))));
}

Sugared select(const std::vector<std::string>& bits, std::vector<Sugared> rows, const Shape& s) {
    if (rows.size() != (std::size_t{1} << bits.size())) throw Error("width-mismatch", "truth table size");
    if (bits.empty()) return rows[0];
    const auto& last = bits.back();
    std::size_t half = rows.size() / 2;
    std::vector<std::string> copies = half == 1 ? std::vector<std::string>{last} : fresh_list("b", half);
    std::vector<Sugared> reduced;
    for (std::size_t t = 0; t < half; ++t) reduced.push_back(if_data(V(copies[t]), rows[2 * t], rows[2 * t + 1], s));
    auto inner = select(std::vector<std::string>(bits.begin(), bits.end() - 1), std::move(reduced), s);
    return half == 1 ? inner : duplicate(last, copies, inner);
}

} // namespace enc

// ---------------------------------------------------------------- data

Built bool_term(int b) { return typed(enc::boolean(b), bool_type()); }

Built string_term(const std::string& bits, std::size_t i) {
    if (bits.find_first_not_of("01") != std::string::npos) throw Error("bad-input", "not a bit string: " + bits);
    auto c = fresh("c"), z = fresh("z");
    Sugared acc = V(z);
    for (auto it = bits.rbegin(); it != bits.rend(); ++it) acc = A(sg::ders(i, V(c)), {enc::boolean(*it == '1'), acc});
    return typed(sg::bang_lam(c, sg::lam(z, acc)), string_type(i));
}

Built numeral(std::size_t n, std::size_t i) {
    auto f = fresh("f"), x = fresh("x");
    Sugared acc = V(x);
    for (std::size_t j = 0; j < n; ++j) acc = sg::app(sg::ders(i, V(f)), acc);
    return typed(sg::bang_lam(f, sg::lam(x, acc)), nat_type(i));
}

Built succ_term(std::size_t i) {
    // λn.λ!f.λx. d^{i+1}(f) (n (!^i d^{i+1}(f)) x)
    auto n = fresh("n"), f = fresh("f"), x = fresh("x");
    auto body = sg::app(sg::ders(i + 1, V(f)), A(V(n), {sg::bangs(i, sg::ders(i + 1, V(f))), V(x)}));
    return typed(sg::lam(n, sg::bang_lam(f, sg::lam(x, body))), imp(nat_type(i), nat_type(i + 1)));
}

Built add_term(std::size_t i, std::size_t j) {
    auto top = std::max(i, j) + 1;
    auto n = fresh("n"), m = fresh("m"), f = fresh("f"), x = fresh("x");
    auto body = A(V(n), {sg::bangs(i, sg::ders(top, V(f))), A(V(m), {sg::bangs(j, sg::ders(top, V(f))), V(x)})});
    return typed(sg::lams({n, m}, sg::bang_lam(f, sg::lam(x, body))), imps({nat_type(i), nat_type(j)}, nat_type(top)));
}

Built mult_term(std::size_t i, std::size_t j) {
    // the second argument arrives boxed, so it is bound by λ! and derelicted
    auto n = fresh("n"), m = fresh("m"), f = fresh("f");
    auto inner = sg::app(sg::ders(i, V(m)), sg::bangs(j, sg::ders(i + j, V(f))));
    auto body = sg::app(V(n), sg::bangs(i, inner));
    return typed(sg::lam(n, sg::bang_lam(m, sg::bang_lam(f, body))),
                 imps({nat_type(i), tbangs(i, nat_type(j))}, nat_type(i + j)));
}

Built coerce_term(std::size_t i) {
    auto n = fresh("n"), f = fresh("f");
    return typed(sg::lam(n, sg::bang_lam(f, sg::app(V(n), sg::bangs(i, sg::ders(i + 1, V(f)))))),
                 imp(nat_type(i), nat_type(i + 1)));
}

Built len_term(std::size_t i) {
    // λs.λ!f. s !^i(λx.λy. let E_B x be I in d^i(f) y)
    auto s = fresh("s"), f = fresh("f"), x = fresh("x"), y = fresh("y");
    auto step = sg::lams({x, y}, sg::let_unit(sg::app(enc::eraser(Shape::boolean()), V(x)), sg::app(sg::ders(i, V(f)), V(y))));
    return typed(sg::lam(s, sg::bang_lam(f, sg::app(V(s), sg::bangs(i, step)))), imp(string_type(i), nat_type(i)));
}

Built eraser_term(const Shape& s) { return typed(enc::eraser(s), imp(shape_type(s), unit_type())); }

// ---------------------------------------------------------------- polynomials

Polynomial Polynomial::parse(const std::string& text) {
    Polynomial p;
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw Error("bad-polynomial", "empty polynomial");
    std::size_t i = 0;
    auto number = [&]() -> std::optional<unsigned long> {
        std::size_t j = i;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        if (j == i) return std::nullopt;
        auto v = std::stoul(s.substr(i, j - i));
        i = j;
        return v;
    };
    while (true) {
        if (i < s.size() && s[i] == '-') throw Error("bad-polynomial", "negative coefficients are not supported");
        unsigned long coef = 1;
        std::size_t power = 0;
        auto c = number();
        if (c) {
            coef = *c;
            if (i < s.size() && s[i] == '*') ++i;
        }
        if (i < s.size() && (s[i] == 'x' || s[i] == 'n')) {
            ++i;
            power = 1;
            if (i < s.size() && s[i] == '^') {
                ++i;
                auto e = number();
                if (!e) throw Error("bad-polynomial", "expected an exponent in '" + text + "'");
                power = *e;
            }
        } else if (!c) {
            throw Error("bad-polynomial", "cannot parse '" + text + "'");
        }
        if (p.coeffs.size() <= power) p.coeffs.resize(power + 1, 0);
        p.coeffs[power] += coef;
        if (i == s.size()) break;
        if (s[i] == '-') throw Error("bad-polynomial", "negative coefficients are not supported");
        if (s[i] != '+') throw Error("bad-polynomial", "unexpected '" + std::string(1, s[i]) + "' in '" + text + "'");
        ++i;
    }
    return p;
}

std::size_t Polynomial::degree() const {
    for (std::size_t j = coeffs.size(); j-- > 0;)
        if (coeffs[j]) return j;
    return 0;
}

unsigned long Polynomial::operator()(unsigned long n) const {
    unsigned long v = 0;
    for (std::size_t j = coeffs.size(); j-- > 0;) v = v * n + coeffs[j];
    return v;
}

std::string Polynomial::to_string() const {
    std::string out;
    for (std::size_t j = coeffs.size(); j-- > 0;) {
        if (!coeffs[j]) continue;
        if (!out.empty()) out += "+";
        if (j == 0 || coeffs[j] != 1) out += std::to_string(coeffs[j]);
        if (j >= 1) out += "x";
        if (j >= 2) out += "^" + std::to_string(j);
    }
    return out.empty() ? "0" : out;
}

namespace {

Sugared nat_annot(Sugared s, std::size_t i) { return sg::annot(std::move(s), nat_type(i)); }

// a numeral term of index exactly `target` computing p at the value supplied
// by `occurrence` (an 𝐍_1 term placed at box depth < D)
Sugared poly_sugared(const Polynomial& p, std::size_t D, const std::function<Sugared()>& occurrence) {
    std::size_t target = 2 * D + 1;
    struct Part {
        Sugared term;
        std::size_t index;
    };
    std::vector<Part> parts;
    // monomials x^j (index j), built innermost-first: x^j = mult_{1,j-1} x !(x^{j-1})
    auto power = [&](std::size_t j) {
        Sugared t = nat_annot(occurrence(), 1);
        for (std::size_t e = 2; e <= j; ++e)
            t = nat_annot(A(mult_term(1, e - 1).source, {occurrence(), sg::bang(t)}), e);
        return t;
    };
    // x^j occurrences sit at box depth j-1, so powers up to D are available
    for (std::size_t j = 0; j < p.coeffs.size(); ++j) {
        auto a = p.coeffs[j];
        if (!a) continue;
        if (j == 0) {
            parts.push_back({numeral(a, 1).source, 1});
        } else if (a == 1) {
            parts.push_back({power(j), j});
        } else {
            auto t = A(mult_term(j, 1).source, {power(j), sg::bangs(j, numeral(a, 1).source)});
            parts.push_back({nat_annot(t, j + 1), j + 1});
        }
    }
    if (parts.empty()) parts.push_back({numeral(0, 1).source, 1});
    Part acc = parts[0];
    for (std::size_t n = 1; n < parts.size(); ++n) {
        auto idx = std::max(acc.index, parts[n].index) + 1;
        acc = {nat_annot(A(add_term(acc.index, parts[n].index).source, {acc.term, parts[n].term}), idx), idx};
    }
    if (acc.index > target) throw Error("bad-polynomial", "index overflow in polynomial composition");
    while (acc.index < target) {
        acc = {nat_annot(sg::app(coerce_term(acc.index).source, acc.term), acc.index + 1), acc.index + 1};
    }
    return acc.term;
}

} // namespace

Built poly_to_term(const Polynomial& p, const std::string& x, std::size_t min_degree) {
    std::size_t D = std::max(p.degree(), min_degree);
    auto body = poly_sugared(p, D, [&] { return sg::ders(D, V(x)); });
    return typed(body, nat_type(2 * D + 1), Context{{x, tbangs(D, nat_type(1))}});
}

// ---------------------------------------------------------------- machines

Built delta_encode(const std::vector<TransitionRow>& rows, std::size_t k) {
    auto table = transition_table(rows, k);
    std::vector<Sugared> data;
    for (std::size_t s = 0; s < (std::size_t{1} << k); ++s) {
        std::string state(k, '0');
        for (std::size_t b = 0; b < k; ++b)
            if (s >> (k - 1 - b) & 1) state[b] = '1';
        for (int r = 0; r < 2; ++r) {
            const auto& row = table.at({state, r});
            data.push_back(enc::data(delta_out_shape(k), row.next + std::to_string(row.write) + (row.move == 'R' ? "1" : "0")));
        }
    }
    auto x = fresh("x"), q = fresh("q"), b = fresh("b");
    std::vector<std::string> qs = k == 1 ? std::vector<std::string>{q} : fresh_list("q", k);
    std::vector<std::string> bits = qs;
    bits.push_back(b);
    auto body = sg::let_tensor(V(x), {q, b}, with_state_bits(q, k, qs, enc::select(bits, data, delta_out_shape(k))));
    return typed(sg::lam(x, body), imp(delta_in_type(k), delta_out_type(k)));
}

Built delta_p_term(const Built& d0, const Built& d1, std::size_t k) {
    auto want = imp(delta_in_type(k), delta_out_type(k));
    if (!type_equal(d0.type, want) || !type_equal(d1.type, want))
        throw Error("width-mismatch", "transition encodings must have type 𝐁^{k}⊗𝐁 ⊸ 𝐁^{k}⊗𝐁⊗𝐁");
    // λx. proj(copy^{0^{k+1}} x as x0, x1 in <δ0 x0, δ1 x1>)
    auto x = fresh("x"), x0 = fresh("x"), x1 = fresh("x");
    auto body = sg::proj(sg::copy(enc::data(delta_in_shape(k), zeros(k + 1)), V(x), x0, x1, sg::app(d0.source, V(x0)),
                                  sg::app(d1.source, V(x1))));
    return typed(sg::lam(x, body), want);
}

Built delta_p_for(const PtmSpec& spec) {
    validate(spec);
    return delta_p_term(delta_encode(spec.delta0, spec.state_width), delta_encode(spec.delta1, spec.state_width),
                        spec.state_width);
}

namespace {

// cells c b̲0 ∘ … ∘ c b̲n (identity when empty)
Sugared tape_part(const std::string& bits, const std::function<Sugared()>& cell) {
    std::vector<Sugared> fs;
    for (char b : bits) fs.push_back(sg::app(cell(), enc::boolean(b == '1')));
    if (fs.empty()) return enc::identity();
    if (fs.size() == 1) {
        auto z = fresh("z");
        return sg::lam(z, sg::app(fs[0], V(z)));
    }
    return sg::compose_all(fs);
}

// let s !^i(d^i(c)) be l⊗r⊗cl⊗bl⊗cr⊗br⊗q in body
struct Decomposed {
    std::string l, r, cl, bl, cr, br, q;
};

Sugared open_id(const std::string& s, const std::string& c, std::size_t i, const Decomposed& v, Sugared body) {
    return sg::let_tensor(sg::app(V(s), sg::bangs(i, sg::ders(i, V(c)))), {v.l, v.r, v.cl, v.bl, v.cr, v.br, v.q},
                          std::move(body));
}

Decomposed fresh_decomposed() {
    return {fresh("l"), fresh("r"), fresh("cl"), fresh("bl"), fresh("cr"), fresh("br"), fresh("q")};
}

} // namespace

Built config_term(const std::string& left, const std::string& right, const std::string& state, std::size_t i) {
    auto c = fresh("c");
    auto cell = [&] { return sg::ders(i, V(c)); };
    auto body = sg::tensor({tape_part(left, cell), tape_part(right, cell), enc::data(Shape::bools(state.size()), state)});
    return typed(sg::bang_lam(c, body), ptm_type(i, state.size()));
}

Built decom_term(std::size_t i, std::size_t k) {
    auto m = fresh("m"), c = fresh("c");
    auto l = fresh("l"), r = fresh("r"), q = fresh("q");
    auto sl = fresh("sl"), cl = fresh("cl"), bl = fresh("bl");
    auto sr = fresh("sr"), cr = fresh("cr"), br = fresh("br");
    // F[x] = λb.λz. let z be g⊗h⊗j in (h j ∘ g) ⊗ x ⊗ b
    auto b = fresh("b"), z = fresh("z"), g = fresh("g"), h = fresh("h"), j = fresh("j");
    auto F = sg::lams({b, z}, sg::let_tensor(V(z), {g, h, j},
                                             sg::tensor({sg::compose(sg::app(V(h), V(j)), V(g)), sg::ders(i, V(c)), V(b)})));
    auto start = [] {
        auto x = fresh("x");
        auto er = sg::lam(x, sg::let_unit(sg::app(enc::eraser(Shape::boolean()), V(x)), enc::identity()));
        return sg::tensor({enc::identity(), er, enc::boolean(0)});
    };
    auto body = sg::let_tensor(
        sg::app(V(m), sg::bangs(i, F)), {l, r, q},
        sg::let_tensor(sg::app(V(l), start()), {sl, cl, bl},
                       sg::let_tensor(sg::app(V(r), start()), {sr, cr, br},
                                      sg::tensor({V(sl), V(sr), V(cl), V(bl), V(cr), V(br), V(q)}))));
    return typed(sg::lam(m, sg::bang_lam(c, body)), imp(ptm_type(i, k), id_type(i, k)));
}

Built com_term(std::size_t i, std::size_t k, const Built& delta_p) {
    auto s = fresh("s"), c = fresh("c");
    auto v = fresh_decomposed();
    auto q2 = fresh("q"), b2 = fresh("b"), mv = fresh("mv"), m1 = fresh("mv"), m2 = fresh("mv");
    auto a = fresh("a"), bb = fresh("b"), u = fresh("u"), w = fresh("w");
    // the move bit picks the order of the two touched cells and the side receiving them
    auto X = sg::app(V(v.cr), V(b2));
    auto Y = sg::app(V(v.cl), V(v.bl));
    auto recombine = sg::let_tensor(
        A(V(m1), {Y, X}), {a, bb},
        sg::let_tensor(A(V(m2), {enc::identity(), sg::compose(V(a), V(bb))}), {u, w},
                       sg::tensor({sg::compose(V(u), V(v.l)), sg::compose(V(w), V(v.r)), V(q2)})));
    auto body = open_id(s, c, i, v,
                        sg::let_tensor(sg::app(delta_p.source, sg::tensor({V(v.q), V(v.br)})), {q2, b2, mv},
                                       enc::duplicate(mv, {m1, m2}, recombine)));
    return typed(sg::lam(s, sg::bang_lam(c, body)), imp(id_type(i, k), ptm_type(i, k)));
}

Built tr_term(std::size_t i, std::size_t k, const Built& delta_p) {
    auto z = fresh("z");
    return typed(sg::lam(z, sg::app(com_term(i, k, delta_p).source, sg::app(decom_term(i, k).source, V(z)))),
                 imp(ptm_type(i, k), ptm_type(i, k)));
}

Built left_term(std::size_t i, std::size_t k) {
    auto s = fresh("s"), c = fresh("c"), m = fresh("m");
    auto v = fresh_decomposed();
    auto right = sg::compose(sg::app(V(v.cl), V(v.bl)), sg::compose(sg::app(V(v.cr), V(v.br)), V(v.r)));
    auto lm = sg::lam(s, sg::bang_lam(c, open_id(s, c, i, v, sg::tensor({V(v.l), right, V(v.q)}))));
    auto lm_t = typed(lm, imp(id_type(i, k), ptm_type(i, k)));
    return typed(sg::lam(m, sg::app(lm_t.source, sg::app(decom_term(i, k).source, V(m)))), imp(ptm_type(i, k), ptm_type(i, k)));
}

Built write_term(std::size_t i, std::size_t k) {
    // R = λb'.λq'.λp. let p be l⊗r⊗cl⊗bl⊗cr in (cr b' ∘ cl bl ∘ l) ⊗ r ⊗ q'
    auto b1 = fresh("b"), q1 = fresh("q"), p = fresh("p");
    auto rv = fresh_decomposed();
    auto R = sg::lams({b1, q1, p}, sg::let_tensor(V(p), {rv.l, rv.r, rv.cl, rv.bl, rv.cr},
                                                  sg::tensor({sg::compose(sg::app(V(rv.cr), V(b1)),
                                                                          sg::compose(sg::app(V(rv.cl), V(rv.bl)), V(rv.l))),
                                                              V(rv.r), V(q1)})));
    auto a = tvar("a");
    auto aa = imp(a, a);
    auto cell = imps({bool_type(), a}, a);
    auto r_type = forall("a", imps({bool_type(), bool_tuple_type(k), tensor_type({aa, aa, cell, bool_type(), cell})},
                                   tensor_type({aa, aa, bool_tuple_type(k)})));
    auto R_src = sg::annot(R, r_type);
    // T = λb.λs.λ!c. let s !^i(d^i(c)) be … in let E_B br be I in R b q (l⊗r⊗cl⊗bl⊗cr)
    auto b = fresh("b"), s = fresh("s"), c = fresh("c"), m = fresh("m");
    auto v = fresh_decomposed();
    auto T = sg::lams({b, s}, sg::bang_lam(c, open_id(s, c, i, v,
                                                      sg::let_unit(sg::app(enc::eraser(Shape::boolean()), V(v.br)),
                                                                   A(R_src, {V(b), V(v.q),
                                                                             sg::tensor(vars({v.l, v.r, v.cl, v.bl, v.cr}))})))));
    auto T_t = typed(T, imps({bool_type(), id_type(i, k)}, ptm_type(i, k)));
    return typed(sg::lams({b, m}, A(T_t.source, {V(b), sg::app(decom_term(i, k).source, V(m))})),
                 imps({bool_type(), ptm_type(i, k)}, ptm_type(i, k)));
}

Built init_term(std::size_t i, std::size_t k, const std::string& q0) {
    if (q0.size() != k) throw Error("width-mismatch", "initial state width");
    auto n = fresh("n"), c = fresh("c"), z = fresh("z");
    auto zeros_part = sg::lam(z, A(V(n), {sg::bangs(i, sg::app(sg::ders(i, V(c)), enc::boolean(0))), V(z)}));
    auto body = sg::tensor({enc::identity(), zeros_part, enc::data(Shape::bools(k), q0)});
    return typed(sg::lam(n, sg::bang_lam(c, body)), imp(nat_type(i), ptm_type(i, k)));
}

Built in_term(std::size_t i, std::size_t k) {
    // CPS fold: cells are written left to right, then the head walks back
    // W = λb.λκ.λm. left (κ (write b m));  in = λs.λm. s !W (λz.z) m
    auto b = fresh("b"), kk = fresh("k"), m = fresh("m"), s = fresh("s"), m2 = fresh("m");
    auto W = sg::lams({b, kk, m}, sg::app(left_term(i, k).source, sg::app(V(kk), A(write_term(i, k).source, {V(b), V(m)}))));
    auto ptm = ptm_type(i, k);
    auto W_src = sg::annot(W, imps({bool_type(), imp(ptm, ptm), ptm}, ptm));
    return typed(sg::lams({s, m2}, A(V(s), {sg::bang(W_src), enc::identity(), V(m2)})), imps({string_type(1), ptm}, ptm));
}

Built ext_s_term(std::size_t i, std::size_t k) {
    auto m = fresh("m"), c = fresh("c"), l = fresh("l"), r = fresh("r"), q = fresh("q");
    auto body = sg::let_tensor(sg::app(V(m), sg::bangs(i, sg::ders(i, V(c)))), {l, r, q},
                               sg::let_unit(sg::app(enc::eraser(Shape::bools(k)), V(q)), sg::compose(V(l), V(r))));
    return typed(sg::lam(m, sg::bang_lam(c, body)), imp(ptm_type(i, k), string_type(i)));
}

Built ext_b_term(std::size_t i, std::size_t k, const std::vector<std::string>& accepting) {
    auto m = fresh("m"), l = fresh("l"), r = fresh("r"), q = fresh("q");
    auto b = fresh("b"), z = fresh("z");
    auto drop = sg::annot(sg::lams({b, z}, sg::let_unit(sg::app(enc::eraser(Shape::boolean()), V(b)), V(z))),
                          imps({bool_type(), unit_type()}, unit_type()));
    std::vector<Sugared> rows;
    for (std::size_t s = 0; s < (std::size_t{1} << k); ++s) {
        std::string state(k, '0');
        for (std::size_t j = 0; j < k; ++j)
            if (s >> (k - 1 - j) & 1) state[j] = '1';
        bool acc = std::find(accepting.begin(), accepting.end(), state) != accepting.end();
        rows.push_back(enc::boolean(acc ? 0 : 1));
    }
    std::vector<std::string> qs = k == 1 ? std::vector<std::string>{q} : fresh_list("q", k);
    auto verdict = with_state_bits(q, k, qs, enc::select(qs, rows, Shape::boolean()));
    auto body = sg::let_tensor(sg::app(V(m), sg::bangs(i, drop)), {l, r, q},
                               sg::let_unit(sg::app(V(l), sg::unit()), sg::let_unit(sg::app(V(r), sg::unit()), verdict)));
    return typed(sg::lam(m, body), imp(ptm_type(i, k), bool_type()));
}

CompiledPtm ptm_compile(const PtmSpec& spec, const Polynomial& time, const Polynomial& space, Extraction e) {
    validate(spec);
    const std::size_t k = spec.state_width;
    const std::size_t d1 = std::max<std::size_t>(time.degree(), 1), d2 = std::max<std::size_t>(space.degree(), 1);
    const std::size_t pi = 2 * d1 + 1, qi = 2 * d2 + 1;
    const std::size_t bangs = std::max(d1, d2) + 1;

    auto s = fresh("s");
    auto len = len_term(1).source;
    auto length = [&] { return sg::app(len, sg::ders(bangs, V(s))); };
    auto P = poly_sugared(time, d1, length);
    auto Q = poly_sugared(space, d2, length);

    auto dp = delta_p_for(spec);
    auto tr = tr_term(qi, k, dp).source;
    auto input = sg::ders(bangs, V(s));
    auto start = A(in_term(qi, k).source, {input, sg::app(init_term(qi, k, spec.initial).source, Q)});
    auto run = A(P, {sg::bangs(pi, tr), start});

    Sugared body;
    Type result;
    if (e == Extraction::Tape) {
        auto Q2 = poly_sugared(space, d2, length);
        auto rewound = A(Q2, {sg::bangs(qi, left_term(qi, k).source), run});
        body = sg::app(ext_s_term(qi, k).source, rewound);
        result = string_type(qi);
    } else {
        body = sg::app(ext_b_term(qi, k, spec.accepting).source, run);
        result = bool_type();
    }
    CompiledPtm out;
    out.program = typed(sg::bang_lam(s, body), imp(tbangs(bangs, string_type(1)), result));
    out.bangs = bangs;
    out.index = qi;
    out.time = time;
    out.space = space;
    return out;
}

Term apply_compiled(const CompiledPtm& c, const std::string& input) {
    return app(c.program.term, bangs(c.bangs, string_term(input, 1).term));
}

// ---------------------------------------------------------------- decoders

namespace {

bool is_ders_of(const Term& t, const std::string& x) {
    Term u = t;
    std::size_t n = 0;
    while (u->kind == TermKind::Der) {
        u = u->kids[0];
        ++n;
    }
    return n > 0 && u->kind == TermKind::Var && u->name == x;
}

// λz. C b1 (C b2 (… z)) with C = d…(c); empty part is λz.z
std::optional<std::string> decode_cells(const Term& t, const std::string& c, const std::string& z) {
    std::string out;
    Term u = t;
    while (!(u->kind == TermKind::Var && u->name == z)) {
        if (u->kind != TermKind::App) return std::nullopt;
        const Term& f = u->kids[0];
        if (f->kind != TermKind::App || !is_ders_of(f->kids[0], c)) return std::nullopt;
        auto b = decode_bool(f->kids[1]);
        if (!b) return std::nullopt;
        out += static_cast<char>('0' + *b);
        u = u->kids[1];
    }
    return out;
}

std::optional<std::string> decode_part(const Term& t, const std::string& c) {
    if (t->kind != TermKind::Lam) return std::nullopt;
    return decode_cells(t->kids[0], c, t->name);
}

// λf. f t1 … tn
std::optional<std::vector<Term>> tuple_parts(const Term& t, std::size_t n) {
    if (t->kind != TermKind::Lam) return std::nullopt;
    std::vector<Term> parts;
    Term u = t->kids[0];
    while (u->kind == TermKind::App) {
        parts.push_back(u->kids[1]);
        u = u->kids[0];
    }
    if (u->kind != TermKind::Var || u->name != t->name || parts.size() != n) return std::nullopt;
    std::reverse(parts.begin(), parts.end());
    for (const auto& p : parts)
        if (occurs_free(p, t->name)) return std::nullopt;
    return parts;
}

} // namespace

std::optional<int> decode_bool(const Term& t) {
    if (t->kind != TermKind::Lam || t->kids[0]->kind != TermKind::Lam) return std::nullopt;
    const auto& x = t->name;
    const auto& y = t->kids[0]->name;
    if (x == y) return std::nullopt;
    auto parts = tuple_parts(t->kids[0]->kids[0], 2);
    if (!parts) return std::nullopt;
    const auto& a = (*parts)[0];
    const auto& b = (*parts)[1];
    if (a->kind != TermKind::Var || b->kind != TermKind::Var) return std::nullopt;
    if (a->name == x && b->name == y) return 0;
    if (a->name == y && b->name == x) return 1;
    return std::nullopt;
}

std::optional<std::string> decode_bools(const Term& t, const Shape& s) {
    if (s.is_bool()) {
        auto b = decode_bool(t);
        if (!b) return std::nullopt;
        return std::string(1, static_cast<char>('0' + *b));
    }
    auto parts = tuple_parts(t, s.parts.size());
    if (!parts) return std::nullopt;
    std::string out;
    for (std::size_t j = 0; j < s.parts.size(); ++j) {
        auto d = decode_bools((*parts)[j], s.parts[j]);
        if (!d) return std::nullopt;
        out += *d;
    }
    return out;
}

std::optional<std::size_t> decode_numeral(const Term& t) {
    if (t->kind != TermKind::BangLam || t->kids[0]->kind != TermKind::Lam) return std::nullopt;
    const auto& f = t->name;
    const auto& x = t->kids[0]->name;
    std::size_t n = 0;
    Term u = t->kids[0]->kids[0];
    while (!(u->kind == TermKind::Var && u->name == x)) {
        if (u->kind != TermKind::App || !is_ders_of(u->kids[0], f)) return std::nullopt;
        u = u->kids[1];
        ++n;
    }
    return n;
}

std::optional<std::string> decode_string(const Term& t) {
    if (t->kind != TermKind::BangLam || t->kids[0]->kind != TermKind::Lam) return std::nullopt;
    return decode_cells(t->kids[0]->kids[0], t->name, t->kids[0]->name);
}

std::optional<DecodedConfig> decode_config(const Term& t, std::size_t k) {
    if (t->kind != TermKind::BangLam) return std::nullopt;
    auto parts = tuple_parts(t->kids[0], 3);
    if (!parts) return std::nullopt;
    auto l = decode_part((*parts)[0], t->name);
    auto r = decode_part((*parts)[1], t->name);
    auto q = decode_bools((*parts)[2], Shape::bools(k));
    if (!l || !r || !q) return std::nullopt;
    return DecodedConfig{*l, *r, *q};
}

} // namespace psta
