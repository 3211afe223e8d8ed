#pragma once

#include <cstdint>
#include <vector>

#include "curvelab/bivar.hpp"

namespace curvelab {

// Tuning for the truncated-quotient colength runs.  Zeros mean defaults
// derived from the multiplicity of the input.
struct OracleOptions {
    unsigned cap = 0;  // largest truncation degree tried before giving up
    unsigned step = 0; // stabilization stride between probed degrees
};

// dim C[[x,y]] / (gens + m^D), computed modulo the given prime.  Exposed as
// a testing hook for the stabilization protocol.
std::uint64_t quotient_dim_truncated(const std::vector<BivarPoly>& gens, unsigned D,
                                     std::uint64_t prime);

// Milnor number as the colength of the Jacobian ideal (f_x, f_y): truncated
// quotient dimensions at increasing degree until the value repeats across
// two strides, modulo two independent primes (third prime as tie-break).
// Throws OracleInconclusive if the dimensions never stabilize below the cap
// or the primes cannot be reconciled.
std::uint64_t milnor_oracle(const BivarPoly& f, std::uint64_t seed, const OracleOptions& opt = {});

// Tjurina number as the colength of (f, f_x, f_y), same protocol.
std::uint64_t tjurina_oracle(const BivarPoly& f, std::uint64_t seed, const OracleOptions& opt = {});

} // namespace curvelab
