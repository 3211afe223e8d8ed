#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "curvelab/rational.hpp"
#include "curvelab/series.hpp"

namespace curvelab {

// Sparse polynomial in x, y with rational coefficients.
// Keys are (x-exponent, y-exponent); zero coefficients are never stored.
struct BivarPoly {
    std::map<std::pair<unsigned, unsigned>, Rat> terms;

    bool is_zero() const { return terms.empty(); }
    static BivarPoly zero() { return {}; }
    static BivarPoly constant(const Rat& c);
    static BivarPoly monomial(unsigned a, unsigned b, const Rat& c);
    static BivarPoly var_x() { return monomial(1, 0, 1); }
    static BivarPoly var_y() { return monomial(0, 1, 1); }

    void add_term(unsigned a, unsigned b, const Rat& c);
    unsigned deg_x() const;
    unsigned deg_y() const;
    // Smallest total degree of a term (order of vanishing at the origin).
    unsigned multiplicity() const;
    Rat coeff(unsigned a, unsigned b) const;
};

BivarPoly operator+(const BivarPoly& p, const BivarPoly& q);
BivarPoly operator-(const BivarPoly& p, const BivarPoly& q);
BivarPoly operator-(const BivarPoly& p);
BivarPoly operator*(const BivarPoly& p, const BivarPoly& q);
BivarPoly operator*(const Rat& c, const BivarPoly& p);
bool operator==(const BivarPoly& p, const BivarPoly& q);

BivarPoly bivar_dx(const BivarPoly& p);
BivarPoly bivar_dy(const BivarPoly& p);
BivarPoly bivar_swap_xy(const BivarPoly& p);
// p(x + s*y, y)
BivarPoly bivar_shear_x(const BivarPoly& p, const Rat& s);
// p(x, y + s*x)
BivarPoly bivar_shear_y(const BivarPoly& p, const Rat& s);

// Exact division; throws InvalidElimination if the quotient is not polynomial.
BivarPoly bivar_divide_exact(const BivarPoly& p, const BivarPoly& d);

// Divide out content and make the leading coefficient positive, where the
// leading term is the (deg_y, then deg_x) largest.  Result has coprime
// integer coefficients.
BivarPoly bivar_normalize(const BivarPoly& p);

// True if x divides p; likewise for y.
bool bivar_divisible_by_x(const BivarPoly& p);
bool bivar_divisible_by_y(const BivarPoly& p);
BivarPoly bivar_strip_x(const BivarPoly& p); // p / x
BivarPoly bivar_strip_y(const BivarPoly& p); // p / y

// Coefficient of y^b as a truncated series in x.
template <class F>
SeriesTuple<typename F::Elt> bivar_y_coeff_series(const F& f, const BivarPoly& p, unsigned trunc) {
    SeriesTuple<typename F::Elt> out(p.deg_y() + 1, ser_zero(f, trunc));
    for (const auto& [k, c] : p.terms) {
        if (k.first <= trunc) out[k.second].c[k.first] = f.from_rat(c);
    }
    return out;
}

// p evaluated at a pair of truncated series.
template <class F>
Series<typename F::Elt> poly_eval_series(const F& f, const BivarPoly& p, const Series<typename F::Elt>& xs,
                                         const Series<typename F::Elt>& ys) {
    unsigned t = std::min(xs.trunc, ys.trunc);
    auto r = ser_zero(f, t);
    if (p.is_zero()) return r;
    // Power caches keep the cost at deg_x + deg_y multiplications.
    std::vector<Series<typename F::Elt>> xp{ser_monomial(f, t, 0, f.one())};
    std::vector<Series<typename F::Elt>> yp{ser_monomial(f, t, 0, f.one())};
    auto xs_t = ser_truncate(f, xs, t);
    auto ys_t = ser_truncate(f, ys, t);
    for (unsigned i = 1; i <= p.deg_x(); ++i) xp.push_back(ser_mul(f, xp.back(), xs_t));
    for (unsigned i = 1; i <= p.deg_y(); ++i) yp.push_back(ser_mul(f, yp.back(), ys_t));
    for (const auto& [k, c] : p.terms) {
        auto term = ser_scale(f, f.from_rat(c), ser_mul(f, xp[k.first], yp[k.second]));
        r = ser_add(f, r, term);
    }
    return r;
}

// Univariate polynomial in an auxiliary variable t with BivarPoly
// coefficients, index = t-degree.
using TPoly = std::vector<BivarPoly>;

// Determinant of a square polynomial matrix by fraction-free elimination.
BivarPoly bivar_mat_det(std::vector<std::vector<BivarPoly>> a);

// Resultant of p and q with respect to t, as a Sylvester determinant
// expanded by fraction-free elimination.
BivarPoly resultant_t(const TPoly& p, const TPoly& q);

// Deterministic rendering, inverse of parse_bivar on its own output.
std::string bivar_to_string(const BivarPoly& p);

// Grammar: integers, rationals p/q, x, y, + - * ^, parentheses; juxtaposition
// multiplies.  Throws ParseError with a character position.
BivarPoly parse_bivar(const std::string& text);

} // namespace curvelab
