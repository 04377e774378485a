#pragma once

#include <stdexcept>

namespace horizonlab {

// Error taxonomy shared by all modules. The CLI maps these to exit codes:
// validation/format -> 2, numerical/convergence -> 3, I/O -> 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : Error { using Error::Error; };
struct ContractViolation : Error { using Error::Error; };
struct DegenerateInput : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct ConvergenceFailure : Error { using Error::Error; };
struct CapacityError : Error { using Error::Error; };
struct ArithmeticDomainError : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };
struct StepSizeError : Error { using Error::Error; };
struct ReferenceQualityError : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

} // namespace horizonlab
