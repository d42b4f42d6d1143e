#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dpw {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed sparse structure (index out of range, broken symmetry flag).
class StructuralError : public Error {
public:
    using Error::Error;
};

/// A documented precondition was violated by the caller.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a formula (e.g. log singularity).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Parameters violate a modelling condition such as d_eps <= eps.
class InfeasibleError : public Error {
public:
    InfeasibleError(std::string condition, const std::string& what)
        : Error(what), condition_(std::move(condition)) {}

    const std::string& condition() const noexcept { return condition_; }

private:
    std::string condition_;
};

/// Discretisation too coarse for the requested geometry.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// Mesh or problem size exceeds the configured budget.
class BudgetError : public Error {
public:
    using Error::Error;
};

/// Iterative method stopped before reaching its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> residuals)
        : Error(what), residuals_(std::move(residuals)) {}

    const std::vector<double>& residuals() const noexcept { return residuals_; }

private:
    std::vector<double> residuals_;
};

/// Invalid user configuration; `key` names the offending entry.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error(what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace dpw
