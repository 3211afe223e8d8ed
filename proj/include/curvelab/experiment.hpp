#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "curvelab/branch.hpp"

namespace curvelab {

// Descriptor of a random-pair family: one equisingularity class given by its
// semigroup generators, a list of intersection targets, and sample counts.
struct ExperimentFamily {
    std::vector<std::uint64_t> generators;
    std::vector<std::uint64_t> targets;
    unsigned samples = 5;
    unsigned retries = 8;
};

struct ExperimentRow {
    std::uint64_t target = 0;
    unsigned instance = 0;
    bool generated = false;
    std::string failure;
    std::uint64_t intersection = 0;
    std::uint64_t tau_berger = 0;
    std::optional<std::uint64_t> tau_oracle;
};

// Per-target floor of the observed values next to the conjectured minimum
// 2I + c; reported, never judged.
struct ExperimentSummary {
    std::uint64_t target = 0;
    bool any = false;
    std::uint64_t min_tau = 0;
    std::uint64_t reference = 0;
};

struct ExperimentResult {
    std::vector<ExperimentRow> rows;
    std::vector<ExperimentSummary> summaries;
};

// Characteristic exponents beta_0..beta_g recovered from the semigroup
// generators; validates the plane-branch conditions.
std::vector<std::uint64_t> exponents_from_generators(const std::vector<std::uint64_t>& gens);

// Random exact branch in the class: nonzero coefficients at the
// characteristic exponents, free coefficients on the allowed support up to
// `upto`.
Parametrization random_branch(const std::vector<std::uint64_t>& gens, unsigned upto,
                              std::mt19937_64& rng);

// Equisingular pair with the prescribed intersection number, built by contact
// splitting at the matching exponent and verified by the intersection
// engine; throws Error when the target sits below the equisingular floor.
std::pair<Parametrization, Parametrization> random_pair(const std::vector<std::uint64_t>& gens,
                                                        std::uint64_t target,
                                                        std::mt19937_64& rng);

ExperimentResult run_experiment(const ExperimentFamily& fam, std::uint64_t seed, bool oracle);

} // namespace curvelab
