#pragma once

#include <stdexcept>

namespace bipep {

// Common base so callers can catch any library failure in one clause.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidGridError : Error { using Error::Error; };
struct InvalidDimensionError : Error { using Error::Error; };
// Field arity / grid mismatch between operands.
struct ShapeError : Error { using Error::Error; };
// Zero-mean or charge-neutrality violation (periodic Poisson solvability).
struct CompatibilityError : Error { using Error::Error; };
struct DensityFloorError : Error { using Error::Error; };
struct UnstableStateError : Error { using Error::Error; };
struct InsufficientDataError : Error { using Error::Error; };
struct LogDomainError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace bipep
