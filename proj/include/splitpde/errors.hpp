#pragma once

#include <stdexcept>
#include <string>

namespace splitpde {

/// Base class for all library failures.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad user input: malformed config, invalid scheme/problem combination, ...
struct ConfigError : Error {
    using Error::Error;
};

/// Mismatched grid sizes, non-conforming vectors.
struct DimensionError : Error {
    using Error::Error;
};

/// Generic numerical failure during an integration run.
struct NumericalError : Error {
    using Error::Error;
};

/// Krylov iteration did not reach the requested tolerance.
struct KrylovError : NumericalError {
    KrylovError(const std::string& what, double residual_estimate)
        : NumericalError(what), residual(residual_estimate) {}
    double residual;
};

/// Finite-time blow-up of an analytic reaction flow at a grid node.
struct BlowUpError : NumericalError {
    BlowUpError(const std::string& what, int node_index)
        : NumericalError(what), node(node_index) {}
    int node;
};

/// Analytic corrector whose boundary trace disagrees with the requested one.
struct TraceMismatchError : NumericalError {
    TraceMismatchError(const std::string& what, double disc)
        : NumericalError(what), discrepancy(disc) {}
    double discrepancy;
};

/// Multigrid smoother failed to reach its tolerance within the cycle cap.
struct MultigridError : NumericalError {
    MultigridError(const std::string& what, double res)
        : NumericalError(what), residual(res) {}
    double residual;
};

}  // namespace splitpde
