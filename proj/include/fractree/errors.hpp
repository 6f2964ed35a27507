#pragma once

#include <stdexcept>
#include <string>

namespace fractree {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// input fails a documented precondition
struct ValidationError : Error { using Error::Error; };
struct DomainError : ValidationError { using ValidationError::ValidationError; };
struct GridMismatch : ValidationError { using ValidationError::ValidationError; };
struct DepthLimit : ValidationError { using ValidationError::ValidationError; };
struct OutOfValidity : ValidationError { using ValidationError::ValidationError; };

// numeric failure at runtime
struct NumericError : Error { using Error::Error; };
struct NonFinite : NumericError { using NumericError::NumericError; };
struct PoleProximity : NumericError { using NumericError::NumericError; };
struct PoleOnAxis : NumericError { using NumericError::NumericError; };
struct ZeroDenominator : NumericError { using NumericError::NumericError; };
struct ZeroFrequency : NumericError { using NumericError::NumericError; };
struct ZeroMagnitude : NumericError { using NumericError::NumericError; };
struct ZeroTarget : NumericError { using NumericError::NumericError; };
struct DegenerateBranch : NumericError { using NumericError::NumericError; };
struct DegenerateAllRootsEqual : NumericError { using NumericError::NumericError; };
struct NoConvergence : NumericError { using NumericError::NumericError; };
struct NoImprovement : NumericError { using NumericError::NumericError; };
struct IllConditioned : NumericError { using NumericError::NumericError; };
struct ContinuityFailure : NumericError { using NumericError::NumericError; };

} // namespace fractree
