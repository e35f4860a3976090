#pragma once

#include <stdexcept>
#include <string>

namespace epr {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad arguments: non-finite entries, dimension mismatches, out-of-domain parameters.
struct InvalidInput : Error {
    using Error::Error;
};

struct DimensionMismatch : InvalidInput {
    using InvalidInput::InvalidInput;
};

// An iterative kernel (SVD sweep, QR iteration, resampling loop) gave up.
struct NumericalFailure : Error {
    using Error::Error;
};

struct NotHermitian : InvalidInput {
    using InvalidInput::InvalidInput;
};

// Domain rejections: the input is a well-formed matrix but not the object asked for.
struct NotAnEp : Error {
    using Error::Error;
};

struct DiabolicPoint : NotAnEp {
    using NotAnEp::NotAnEp;
};

struct ChainSolveFailure : NumericalFailure {
    using NumericalFailure::NumericalFailure;
};

struct DegenerateEigensolve : NumericalFailure {
    using NumericalFailure::NumericalFailure;
};

struct ZeroPerturbation : InvalidInput {
    using InvalidInput::InvalidInput;
};

// Leading-order eigenstate ansatz breaks down: eigenvector has no component
// along the reference state.
struct OrthogonalEigenvector : Error {
    using Error::Error;
};

// The driven system has a growing mode; no finite long-time limit exists.
struct NoSteadyState : Error {
    using Error::Error;
};

struct ResonanceSingular : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct SingularTransform : NumericalFailure {
    using NumericalFailure::NumericalFailure;
};

} // namespace epr
