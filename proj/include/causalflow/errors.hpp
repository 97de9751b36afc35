#pragma once

#include <stdexcept>
#include <string>

namespace causalflow {

// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- network validation ---
struct CycleDetected : Error {
    using Error::Error;
};
struct NonPositiveDecay : Error {
    using Error::Error;
};
struct RootWithoutNoise : Error {
    using Error::Error;
};
struct DuplicateNode : Error {
    using Error::Error;
};
struct DuplicateEdge : Error {
    using Error::Error;
};
struct UnknownNode : Error {
    using Error::Error;
};

// --- numerics ---
struct NumericalFailure : Error {
    using Error::Error;
};
struct SingularConditioning : Error {
    using Error::Error;
};
// Raised where a conditional law collapses to a point mass and an
// information quantity diverges (e.g. transfer entropy at zero lag).
struct DeterministicRelation : Error {
    using Error::Error;
};

// --- simulation / estimation ---
struct StepTooLarge : Error {
    using Error::Error;
};
struct InsufficientData : Error {
    using Error::Error;
};

// Closed forms of the three-node loop are derived for gamma == 0 only.
struct GammaNonZero : Error {
    using Error::Error;
};

// Command line / file format problems (exit code 1 in the CLI).
struct UsageError : Error {
    using Error::Error;
};

}  // namespace causalflow
