#pragma once

#include <stdexcept>

namespace kmzi {

/// Parameters outside the regime where the requested quantity is defined
/// (e.g. a closed-form matrix power at unstable (phi, r)).
struct UnstableParameterError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The photon number crossed the runaway guard during propagation.
struct UnboundedGrowthError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An iterative quantity did not settle within the requested tolerance.
struct NotConvergedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Phase calibration could not satisfy the photon cap.
struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A pure state reported a non-zero purity derivative; indicates a bug in
/// whoever produced the tangent, so this is a logic error rather than a
/// numeric one.
struct TangentInconsistencyError : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace kmzi
