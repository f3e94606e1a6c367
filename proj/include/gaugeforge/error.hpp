#pragma once

#include <stdexcept>
#include <string>

namespace gaugeforge {

// Input could not be understood (bad file, bad token, bad flag). CLI exit 2.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct WeightError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Requested problem exceeds what exact methods here can handle.
struct SizeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Target vector is not in the span of the candidates.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An algebraic invariant that should hold by construction did not.
struct ConsistencyError : std::logic_error {
    using std::logic_error::logic_error;
};

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EncodingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace gaugeforge
