// errors.hpp — Exception hierarchy shared by all modules

#pragma once

#include <stdexcept>
#include <string>

namespace deco {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad inputs or broken invariants detected before any numerics run.
// The CLI maps this family to exit code 2.
struct ValidationError : Error {
    using Error::Error;
};

struct SchemaError : ValidationError {
    using ValidationError::ValidationError;
};

struct IncompatibleGrids : ValidationError {
    using ValidationError::ValidationError;
};

struct ChannelCollision : ValidationError {
    using ValidationError::ValidationError;
};

struct InvalidParameters : ValidationError {
    using ValidationError::ValidationError;
};

struct KernelSystemMismatch : ValidationError {
    using ValidationError::ValidationError;
};

struct DimensionTooLarge : ValidationError {
    using ValidationError::ValidationError;
};

// Numerical failures on inputs that passed validation.
// The CLI maps this family to exit code 3.
struct NumericalError : Error {
    using Error::Error;
};

struct HermiticityViolation : NumericalError {
    using NumericalError::NumericalError;
};

struct NonHermitianInput : NumericalError {
    using NumericalError::NumericalError;
};

struct GridTooCoarse : NumericalError {
    using NumericalError::NumericalError;
};

struct DampingVanishes : NumericalError {
    using NumericalError::NumericalError;
};

struct NonPositiveKernel : NumericalError {
    using NumericalError::NumericalError;
};

struct DecompositionResidualTooLarge : NumericalError {
    using NumericalError::NumericalError;
};

struct ExponentialDivergence : NumericalError {
    using NumericalError::NumericalError;
};

struct StepSizeTooLarge : NumericalError {
    using NumericalError::NumericalError;
};

struct TruncationError : NumericalError {
    using NumericalError::NumericalError;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace deco
