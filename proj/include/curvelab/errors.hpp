#pragma once

#include <stdexcept>
#include <string>

namespace curvelab {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Elimination produced an inconsistent pivot structure.  Always a bug, never
// an input problem, so callers should not catch this one.
struct InvalidElimination : Error {
    using Error::Error;
};

// Parametrization violates its invariants (non-primitive, zero x-part, ...).
struct InvalidParametrization : Error {
    using Error::Error;
};

// A series order or valuation escaped the working truncation.  Retryable.
struct TruncationTooSmall : Error {
    using Error::Error;
};

// Puiseux expansion hit a stage whose root is not rational.
struct UnsupportedCoefficientField : Error {
    using Error::Error;
};

struct NonReducedInput : Error {
    using Error::Error;
};

struct OutOfBox : Error {
    using Error::Error;
};

struct NotInSet : Error {
    using Error::Error;
};

struct NotASubset : Error {
    using Error::Error;
};

struct ConductorViolation : Error {
    using Error::Error;
};

// Quotient-dimension oracle failed to stabilize within its budget.
struct OracleInconclusive : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

} // namespace curvelab
