#pragma once

#include <stdexcept>
#include <string>

namespace ioc {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad grid size, schema violation, broken standing assumption.
class ValidationError : public Error {
public:
    using Error::Error;
};

class DimensionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Argument outside the mathematical domain of an operation (e.g. x not in R^n_+).
class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A point that was required to be feasible is not.
class InfeasibleError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Iterative method hit its cap without meeting the exit criterion.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, int iterations, double residual)
        : Error(what), iterations_(iterations), residual_(residual) {}

    int iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    int iterations_;
    double residual_;
};

class InsufficientPathError : public Error {
public:
    using Error::Error;
};

}  // namespace ioc
