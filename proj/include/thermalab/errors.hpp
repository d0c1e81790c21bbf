#pragma once

#include <stdexcept>
#include <string>

namespace thermalab {

/// Bad experiment configuration (unknown names, missing keys, malformed files).
/// CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Requested evaluation outside the regime where a bound or formula applies
/// (e.g. |beta| >= beta_star). CLI exit code 3.
class RegimeError : public std::domain_error {
public:
    explicit RegimeError(const std::string& msg) : std::domain_error(msg) {}
};

/// Size or combinatorial budget exceeded. The message names the limit.
/// CLI exit code 4.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A quadrature failed to reach its tolerance within the node budget.
/// Carries the best available estimate so callers can decide what to do.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& msg, double best_value, double error_estimate)
        : std::runtime_error(msg), best_value(best_value), error_estimate(error_estimate) {}
    double best_value;
    double error_estimate;
};

} // namespace thermalab
