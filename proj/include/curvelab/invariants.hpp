#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "curvelab/branch.hpp"
#include "curvelab/rational.hpp"
#include "curvelab/valmod.hpp"

namespace curvelab {

// A reduced plane curve germ: parametrized branches plus, when available,
// defining polynomials.  branch_polys is aligned with branches; a zero
// polynomial marks an unknown equation.  product defines the whole curve.
struct CurveSpec {
    BranchList branches;
    std::vector<BivarPoly> branch_polys;
    std::optional<BivarPoly> product;
};

// Spec from parametrizations; exact branches are implicitized so the
// quotient oracles stay available.
CurveSpec spec_from_branches(const BranchList& branches);

// Spec from defining polynomials; each factor may split into several
// branches.  The product is taken verbatim.
CurveSpec spec_from_polys(const std::vector<BivarPoly>& fs, unsigned trunc_hint = 0);

// Everything the report carries; verdict checks that were not applicable or
// were skipped for cost are simply absent from the map.
struct InvariantReport {
    std::vector<CharData> chars;
    std::vector<std::uint64_t> branch_milnor;  // conductor of each branch
    std::vector<std::uint64_t> branch_delta;   // half the conductor
    std::vector<std::uint64_t> branch_tjurina; // one-branch value-set route
    std::vector<std::vector<std::uint64_t>> inter;
    std::uint64_t milnor = 0;
    std::uint64_t delta = 0;
    ValueVector cs;
    std::uint64_t tjurina_berger = 0;
    std::optional<std::uint64_t> tjurina_closed;
    std::optional<std::uint64_t> tjurina_oracle;
    std::vector<std::uint64_t> theta;
    ValueVector lambda_conductor;
    Rat ratio; // milnor / tjurina_berger
    std::map<std::string, bool> verdicts;
};

struct VerifyOptions {
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    bool oracle = true;
    // The Jacobian-ideal comparison is skipped when its box volume exceeds
    // this bound; skipped is not failed.
    std::uint64_t jacobian_budget = 400000;
};

// mu = sum of branch conductors + twice the pairwise intersections - r + 1.
std::uint64_t milnor(const CurveData& cd);

// delta = sum of branch deltas + pairwise intersections; cross-checked
// against the chain distance from 0 to the semigroup conductor, and any
// mismatch throws (engine inconsistency, not an input problem).
std::uint64_t delta_invariant(const CurveData& cd, std::uint64_t seed);

// tau = mu - d(Lambda u {0} \ S): the set-distance route, valid for any
// number of branches.
std::uint64_t tjurina_berger(const CurveData& cd, std::uint64_t seed);

// tau = 2I + c - 1 for two equisingular branches with intersection strictly
// above n_g * beta_bar_g; nullopt otherwise (including the boundary case).
std::optional<std::uint64_t> tjurina_closed(const CurveData& cd);

// tau of a single branch as mu_i minus the count of differential values
// outside the semigroup.
std::uint64_t branch_tjurina_valueset(const Parametrization& p, std::uint64_t seed);

// mu/tau < 4/3, and for two-branch curves with the closed formula in force
// the exact identity 4 tau - 3 mu = 2I - 2c - 1.
bool ratio_check(const InvariantReport& rep);

// Full report with verdicts: berger-vs-oracle, closed-vs-berger,
// jacobian-shift, lambda-conductor, log-kernel-values, theta-closed,
// delta-two-way, milnor-two-way, branch-tjurina-oracle, ratio-bound.
// Failed verdicts are reported, never thrown.
InvariantReport verify_all(const CurveSpec& spec, const VerifyOptions& opt = {});

} // namespace curvelab
