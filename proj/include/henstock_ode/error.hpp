#pragma once

#include <stdexcept>
#include <string>

namespace henstock_ode {

/// Base class for every hard error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An exponential left the representable range.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature gave up before meeting its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace henstock_ode
