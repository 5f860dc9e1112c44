#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cgf {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad or inconsistent input: malformed files, unknown nodes, duplicate
// activations, out-of-order streams. The CLI maps these to exit code 1.
struct InputError : Error {
    using Error::Error;
};

// Failures inside an analysis that received valid input. Exit code 2.
struct ComputationError : Error {
    using Error::Error;
};

// A path count exceeded 64 bits while arbitrary precision was disabled.
struct OverflowError : ComputationError {
    using ComputationError::ComputationError;
};

// The requested operation needs exact (polynomial) mode.
struct CapabilityError : ComputationError {
    using ComputationError::ComputationError;
};

struct DomainError : ComputationError {
    using ComputationError::ComputationError;
};

struct DegenerateSampleError : ComputationError {
    using ComputationError::ComputationError;
};

// Optimizer or EM ran out of iterations. Carries the last iterate so callers
// can inspect how far it got.
struct ConvergenceError : ComputationError {
    ConvergenceError(const std::string& what, std::vector<double> last)
        : ComputationError(what), last_iterate(std::move(last)) {}
    std::vector<double> last_iterate;
};

struct ReconstructionError : ComputationError {
    ReconstructionError(const std::string& what, std::size_t offending_label)
        : ComputationError(what), label(offending_label) {}
    std::size_t label;
};

} // namespace cgf
