#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "curvelab/bivar.hpp"
#include "curvelab/series.hpp"

namespace curvelab {

// One branch of a plane curve germ as t -> (t^n, y(t)), or the coordinate
// swap of that map when axis_swap is set.  y is stored with exponents >= n
// (>= 1 for n = 1); `exact` marks a genuinely polynomial parametrization as
// opposed to a truncation of a longer series.
struct Parametrization {
    unsigned n = 1;
    TruncSeries y;
    bool axis_swap = false;
    bool exact = true;
};

Parametrization make_parametrization(unsigned n, const std::vector<std::pair<unsigned, Rat>>& y_terms,
                                     bool axis_swap = false);

// Checks n >= 1, support bounds, and ord(y) >= n unless y = 0, n = 1.
// Throws InvalidParametrization.
void validate_parametrization(const Parametrization& p);

// True plane coordinates of the branch map (axis_swap resolved), over a
// field object F at the requested truncation.
template <class F>
Series<typename F::Elt> raw_power_series(const F& f, const Parametrization& p, unsigned trunc) {
    return ser_monomial(f, trunc, p.n <= trunc ? p.n : trunc + 1, p.n <= trunc ? f.one() : f.zero());
}

template <class F>
Series<typename F::Elt> raw_companion_series(const F& f, const Parametrization& p, unsigned trunc) {
    auto s = ser_zero(f, trunc);
    for (unsigned i = 0; i < p.y.c.size() && i <= trunc; ++i)
        if (!(p.y.c[i] == 0)) s.c[i] = f.from_rat(p.y.c[i]);
    return s;
}

template <class F>
Series<typename F::Elt> plane_x_series(const F& f, const Parametrization& p, unsigned trunc) {
    return p.axis_swap ? raw_companion_series(f, p, trunc) : raw_power_series(f, p, trunc);
}

template <class F>
Series<typename F::Elt> plane_y_series(const F& f, const Parametrization& p, unsigned trunc) {
    return p.axis_swap ? raw_power_series(f, p, trunc) : raw_companion_series(f, p, trunc);
}

// Largest stored exponent of y; the parametrization is fully known below
// data_limit() and unknown at or above it unless exact.
unsigned param_support_max(const Parametrization& p);

struct CharData {
    unsigned genus = 0;              // g
    std::vector<uint64_t> beta;      // characteristic exponents beta_0..beta_g
    std::vector<uint64_t> beta_bar;  // semigroup generators
    std::vector<uint64_t> e;         // gcd chain, e_g = 1
    std::vector<uint64_t> n_seq;     // n_1..n_g
    uint64_t conductor = 0;
};

// Characteristic data by the gcd-chain recipe on the exponent support;
// throws InvalidParametrization on non-primitive input, TruncationTooSmall
// when an inexact parametrization ends before the gcd chain reaches 1.
CharData char_data(const Parametrization& p);

// Membership bitmap on [0, upto] of the numerical semigroup the generators
// span.
std::vector<char> semigroup_bitmap(const std::vector<uint64_t>& gens, uint64_t upto);

// ord_t h(phi(t)) computed at truncation T; nullopt = above truncation
// (h may vanish on the branch).
std::optional<uint64_t> branch_valuation(const Parametrization& p, const BivarPoly& h, unsigned T);

// Exact decision for exact parametrizations: h(phi) = 0 identically.
bool vanishes_on_branch(const Parametrization& p, const BivarPoly& h);

// Irreducible equation of the branch, content 1, positive leading
// y-coefficient.  Requires an exact parametrization.
BivarPoly implicitize(const Parametrization& p);

// Intersection multiplicity of two distinct branches.  Computed as the
// t-order of a Sylvester-style determinant over the series ring in both
// directions; the two directions must agree.  Throws NonReducedInput when
// the branches coincide, TruncationTooSmall when T cannot resolve the order
// for inexact input.
uint64_t intersection_multiplicity(const Parametrization& a, const Parametrization& b, unsigned T,
                                   uint64_t seed = 0x5eedf00dULL);

// Same, with T chosen automatically from the available data.
uint64_t intersection_multiplicity(const Parametrization& a, const Parametrization& b);

struct DiagonalCheck {
    bool equisingular = false;
    uint64_t intersection = 0;
    uint64_t threshold = 0; // n_g * beta_bar_g  (0 for smooth branches)
    bool diagonal = false;
};

DiagonalCheck diagonal_check(const Parametrization& a, const Parametrization& b);

using BranchList = std::vector<Parametrization>;

// Symmetric matrix of pairwise intersection multiplicities, zero diagonal.
std::vector<std::vector<uint64_t>> pairwise_intersections(const BranchList& bs);

// Branch decomposition of a reduced germ with f(0,0) = 0.  Output
// parametrizations are exact when the expansion terminates and truncated at
// >= trunc_hint otherwise.  Throws NonReducedInput or
// UnsupportedCoefficientField (non-rational Puiseux coefficient).
BranchList newton_puiseux(const BivarPoly& f, unsigned trunc_hint = 0);

// Working truncation for downstream valuations: conductor + largest
// pairwise intersection + multiplicity + margin.
unsigned default_truncation(uint64_t conductor, uint64_t max_pair_intersection, unsigned multiplicity);

} // namespace curvelab
