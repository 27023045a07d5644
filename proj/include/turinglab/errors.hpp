#pragma once

#include <stdexcept>
#include <string>

namespace turinglab {

// Base class for all domain errors thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// kinetics
struct NoConvergenceError : Error { using Error::Error; };
struct SingularJacobianError : Error { using Error::Error; };
struct DerivativeMismatchError : Error { using Error::Error; };

// linear analysis
struct EqualDiffusivitiesError : Error { using Error::Error; };
struct NotRestStableError : Error { using Error::Error; };
struct NoInstabilityError : Error { using Error::Error; };
struct ZeroFvError : Error { using Error::Error; };

// spectral
struct DegenerateBasisError : Error { using Error::Error; };

// simulator
struct ValidityExceededError : Error { using Error::Error; };
struct NonFiniteError : Error { using Error::Error; };

// verification
struct BadOrderError : Error { using Error::Error; };
struct NonNegativeGvError : Error { using Error::Error; };
struct InsufficientDataError : Error { using Error::Error; };

// configuration / CLI
struct ConfigError : Error { using Error::Error; };

}  // namespace turinglab
