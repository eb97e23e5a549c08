// Error taxonomy shared by all magsling modules.
//
// DomainError covers invalid physics/math inputs and degenerate data; the
// leaf types exist so callers (and tests) can react to specific conditions.
// ParseError is reserved for malformed input files and carries the offending
// line number in its message where known.
#pragma once

#include <stdexcept>
#include <string>

namespace magsling {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

// Amplitude denominator is exactly zero: undamped forcing at the natural frequency.
struct ResonanceError : DomainError {
    using DomainError::DomainError;
};

// Integrator left the model's validity region (|theta| > pi/2 or energy growth).
struct InstabilityError : DomainError {
    using DomainError::DomainError;
};

// Trajectory never stays inside the settle band within its duration.
struct NoSettleError : DomainError {
    using DomainError::DomainError;
};

// No sweep length satisfies the noise threshold policy.
struct NoFeasibleLengthError : DomainError {
    using DomainError::DomainError;
};

// Grids do not share georeferencing and cannot be compared cellwise.
struct RegistrationError : DomainError {
    using DomainError::DomainError;
};

// A requested sample point or vertex lies outside a grid's interpolable extent.
struct OutOfExtentError : DomainError {
    using DomainError::DomainError;
};

// Too few valid samples (or zero variance) for the requested statistic.
struct InsufficientDataError : DomainError {
    using DomainError::DomainError;
};

} // namespace magsling
