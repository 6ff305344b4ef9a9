#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace onn {

// Base of every error raised by the library. The CLI maps ConfigError and
// InputError to exit code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameters that violate a documented invariant (sizes, ranges, counts).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed or out-of-range user data (pixels, image files, windows).
class InputError : public Error {
public:
    using Error::Error;
};

// Non-finite values reaching a numeric kernel.
class NumericError : public Error {
public:
    using Error::Error;
};

// Integrator blow-up; carries the step index at which the guard tripped.
class DivergenceError : public NumericError {
public:
    DivergenceError(std::size_t step, const std::string& what)
        : NumericError(what + " (step " + std::to_string(step) + ")"), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// A DOM readout policy that cannot be applied to the given trace.
class PolicyError : public Error {
public:
    using Error::Error;
};

}  // namespace onn
