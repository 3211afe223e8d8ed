#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "curvelab/branch.hpp"
#include "curvelab/linalg.hpp"
#include "curvelab/valueset.hpp"

namespace curvelab {

// Per-curve aggregate shared by the value-set constructions: branch data,
// pairwise intersection numbers, and the conductor of the value semigroup.
struct CurveData {
    BranchList branches;
    std::vector<CharData> chars;
    std::vector<std::vector<std::uint64_t>> inter;
    ValueVector cs;
};

CurveData curve_data(const BranchList& branches);

// Finitely generated module over the local ring of the curve, presented by
// exact generator tuples and a monomial multiplier basis.  The multiplier
// list is closed under the cutoff used at construction time, so the spanning
// family {multiplier * generator} determines every value in [0, gamma_ref].
struct ValuedModule {
    BranchList params;
    std::vector<SeriesTuple<Rat>> generators;               // exact, truncated at T
    std::vector<std::pair<unsigned, unsigned>> multipliers; // monomial exponents (a, b)
    unsigned T = 0;                                         // series precision
    ValueVector gamma_ref;                                  // certified conductor bound
};

// Module generated by ring elements h: tuple components h(phi_i).
// `extra` widens the multiplier cutoff and precision beyond gamma_ref
// (needed when kernels are taken later).
ValuedModule module_from_functions(const BranchList& params, const std::vector<BivarPoly>& hs,
                                   const ValueVector& gamma_ref, unsigned extra = 0);

// Module generated by 1-forms A dx + B dy: tuple components
// t * (A(phi_i) x_i'(t) + B(phi_i) y_i'(t)).
ValuedModule module_from_forms(const BranchList& params,
                               const std::vector<std::pair<BivarPoly, BivarPoly>>& forms,
                               const ValueVector& gamma_ref, unsigned extra = 0);

// Value set of the module on the box [0, gamma_ref], tail certified at
// gamma_ref.  Membership is decided by rank jumps of prefix column spaces;
// runs modulo two independent primes and escalates to exact arithmetic on
// disagreement.  Throws TruncationTooSmall if the precision cannot certify
// the requested box.
BoxedValueSet value_set(const ValuedModule& m, std::uint64_t seed);

// Value set, over the branches not in J, of the submodule of elements whose
// J-components vanish (detected as vanishing to the working precision, with
// a second pass at a deeper threshold; disagreement raises TruncationTooSmall).
// J holds 0-based branch indices.  The module must have been built with
// enough `extra` slack; see kahler_kernel_margin.
BoxedValueSet kernel_values(const ValuedModule& m, const std::vector<unsigned>& J,
                            std::uint64_t seed);

// Value semigroup of the curve on [0, c_S] via the module generated by 1.
BoxedValueSet semigroup_values(const CurveData& cd, std::uint64_t seed);

// Values of the universally finite differential module, box [0, c_S].
BoxedValueSet kahler_values(const CurveData& cd, std::uint64_t seed);

// Values of the Jacobian ideal (f_x, f_y) O on a certified box.
BoxedValueSet jacobian_values(const CurveData& cd, const BivarPoly& f, std::uint64_t seed);

// Residue value set of a single branch: integers d with -d outside the
// differential value set, on the box [-(b0+c), b0+c].  The conductor of the
// result must come out at 1 - b0; any other outcome raises Error.
BoxedValueSet residue_values_irreducible(const Parametrization& p, std::uint64_t seed);

// Defect number of branch i (1-based): values of the differential module on
// branch i not realized by forms vanishing on branches 1..i-1.  theta(_, 1)
// is 0 by definition.
std::uint64_t theta(const CurveData& cd, unsigned i, std::uint64_t seed);

// Multiplier/precision slack needed so that kernel_values can run on a
// differential module of the given curve.
unsigned kahler_kernel_margin(const CurveData& cd);

// Exact coefficient matrix of the spanning family, one row per
// multiplier * generator product, columns blocked per branch with the given
// budgets.  Testing hook for cross-checking the rank-jump engine.
Mat<Rat> span_matrix(const ValuedModule& m, const std::vector<unsigned>& cols);

} // namespace curvelab
