#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mdtube {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user input: malformed files, bad parameters, inconsistent geometry.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A scalar argument outside the domain of a function (e.g. overlapping tubes).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Quadrature or root finding failed to reach its tolerance.
class NumericError : public Error {
public:
    NumericError(const std::string& what, double achieved_error = 0.0)
        : Error(what), achieved_error_(achieved_error) {}
    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

/// Newton iteration did not converge. Carries the residual history.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> history)
        : Error(what), history_(std::move(history)) {}
    const std::vector<double>& history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

}  // namespace mdtube
