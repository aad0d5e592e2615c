#pragma once
#include <stdexcept>
#include <string>

namespace flexlink {

/// Invalid configuration (bad parameter values, malformed scenario files).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure (root bracketing, non-convergent quadrature, singular inertia).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Simulation state became non-finite or unbounded.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(double time, const std::string& what)
        : std::runtime_error(what), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

} // namespace flexlink
