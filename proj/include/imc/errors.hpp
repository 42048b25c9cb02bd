#pragma once

#include <stdexcept>
#include <string>

namespace imc {

/// Base class for all library errors.
struct ImcError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// -- contour / signal conversion ------------------------------------------
struct MonotonicityViolation : ImcError { using ImcError::ImcError; };
struct EvalOutOfRange : ImcError { using ImcError::ImcError; };
struct NonFiniteDerivative : ImcError { using ImcError::ImcError; };

// -- exosystem -------------------------------------------------------------
struct DegenerateL : ImcError { using ImcError::ImcError; };
struct StructureViolation : ImcError { using ImcError::ImcError; };

// -- plant -------------------------------------------------------------------
struct NotObservable : ImcError { using ImcError::ImcError; };

// -- internal model ----------------------------------------------------------
struct DimensionMismatch : ImcError { using ImcError::ImcError; };
struct SingularSystem : ImcError { using ImcError::ImcError; };

// -- stabilizer / sdp ---------------------------------------------------------
struct OutOfRange : ImcError { using ImcError::ImcError; };
struct ObserverPlacementFailure : ImcError { using ImcError::ImcError; };
struct LmiInfeasible : ImcError { using ImcError::ImcError; };
struct LmiMaxIterations : ImcError { using ImcError::ImcError; };

// -- simulation / cli ----------------------------------------------------------
struct SynthesisFailure : ImcError { using ImcError::ImcError; };
struct AssumptionFailure : ImcError { using ImcError::ImcError; };
struct ParseError : ImcError { using ImcError::ImcError; };
struct ConfigError : ImcError { using ImcError::ImcError; };

} // namespace imc
