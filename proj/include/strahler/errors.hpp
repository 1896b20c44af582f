#pragma once

#include <stdexcept>
#include <string>

namespace strahler {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- offspring distribution errors ---
struct NotAProbability : Error {
    using Error::Error;
};
struct DegenerateVariance : Error {
    using Error::Error;
};
struct NotCritical : Error {
    using Error::Error;
};
struct UnknownName : Error {
    using Error::Error;
};
struct BadParam : Error {
    using Error::Error;
};
struct NoBranching : Error {
    using Error::Error;
};

// --- degree-sequence / tree errors ---
struct TreeCompletesEarly : Error {
    using Error::Error;
};
struct TreeUnfinished : Error {
    using Error::Error;
};
struct SumMismatch : Error {
    using Error::Error;
};
struct TooLarge : Error {
    using Error::Error;
};

// --- sampling errors ---
struct InfeasibleSize : Error {
    using Error::Error;
};
struct BudgetExceeded : Error {
    using Error::Error;
};

// --- exact solver errors ---
struct PrecisionExhausted : Error {
    using Error::Error;
};
struct NoBracket : Error {
    using Error::Error;
};
struct BadK : Error {
    using Error::Error;
};

// --- experiment errors ---
struct EmptySample : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace strahler
