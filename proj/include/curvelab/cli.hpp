#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "curvelab/experiment.hpp"
#include "curvelab/invariants.hpp"
#include "curvelab/valueset.hpp"

namespace curvelab {

// One entry of the spec file: either a parametrized branch or a defining
// polynomial (which may split into several branches).
struct SpecEntry {
    std::optional<Parametrization> param;
    std::optional<BivarPoly> poly;
};

struct ParsedSpec {
    std::vector<SpecEntry> entries;
    std::optional<ExperimentFamily> experiment;
    bool oracle = true;
    unsigned truncation_cap = 0; // 0 = automatic
    unsigned modular_primes = 2; // informational
};

// Parses the JSON spec; throws ParseError with position context.
ParsedSpec parse_spec_text(const std::string& text);

// Branch assembly with expansion of polynomial entries; rejects duplicate
// branches ("branches are not distinct").
CurveSpec assemble_curve(const ParsedSpec& ps, unsigned trunc_hint);

// Deterministic JSON renderings (two-space indent, trailing newline).
// analyze_report attaches value-set dumps for small boxes, recomputed with
// the same seeds the verification run used.
std::string analyze_report(const InvariantReport& rep, const CurveData& cd, std::uint64_t seed);
std::string semigroup_report(const CurveData& cd, const BoxedValueSet& s);
std::string lambda_report(const CurveData& cd, const BoxedValueSet& lam);
std::string experiment_report_json(const ExperimentResult& res);
std::string experiment_report_table(const ExperimentResult& res);

// Command-line entry point; returns the process exit code: 0 all verdicts
// pass, 1 input or environment error, 2 at least one verdict failed.
int run_cli(int argc, const char* const* argv);

} // namespace curvelab
