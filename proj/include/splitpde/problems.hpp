#pragma once

#include <string>
#include <vector>

#include "splitpde/schemes.hpp"

namespace splitpde {

/// One benchmark problem: geometry, boundary data, initial condition,
/// reaction term, and the sweep parameters used for convergence studies.
struct ProblemSpec {
    std::string name;   // "quadratic1d", "integro1d", "stiff2d"
    std::string label;  // e.g. "quadratic1d(m=1)"
    int dim = 1;
    int n_interior = 500;  // per axis
    double T = 0.1;
    double param = 1.0;  // m (quadratic) or M (stiff)
    std::vector<double> tau_list;
    double tau_ref = 0.0;
    BoundarySpec bc;
    std::function<double(double, double)> initial;
    std::function<ReactionTerm(const Grid&)> make_reaction;
    /// Closed-form M3 corrector when the problem has one (else empty).
    std::function<AnalyticCorrector(const StateField&, const DiscreteDiffusion&)> m3_analytic;

    Grid make_grid() const;
    DiscreteDiffusion discretize() const;

    /// Samples the initial condition, verifies it is consistent with the
    /// boundary data at t = 0 (within tol), and reconstructs the boundary
    /// values so the discrete trace matches b(0) exactly.
    StateField initial_state(const DiscreteDiffusion& d, double tol = 1e-8) const;
};

/// The built-in experiments: quadratic1d (m = 1, 5), integro1d,
/// stiff2d (M = 1, 100), with their published grids and sweeps.
std::vector<ProblemSpec> builtin_problems();

/// Lookup by name; param selects among variants of the same name
/// (m for quadratic1d, M for stiff2d; ignored for integro1d).
ProblemSpec find_problem(const std::string& name, double param);

/// "paper" keeps the published sizes; "desk" shrinks the 2D grid to 64^2,
/// its reference step to 0.1*2^-12, and its sweep to tau = 0.1*2^-k, k=2..8.
void apply_scale(ProblemSpec& p, const std::string& scale);

}  // namespace splitpde
