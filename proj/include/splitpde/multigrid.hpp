#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "splitpde/laplacian.hpp"

namespace splitpde {

/// Damped-Jacobi settings for the harmonic-extension solver.
/// tol == 0 runs exactly v_cycles cycles; tol > 0 iterates until the
/// relative residual drops below tol (failing after max_cycles).
struct SmootherConfig {
    int v_cycles = 2;
    int pre_sweeps = 3;
    int post_sweeps = 3;
    double damping = 2.0 / 3.0;
    double tol = 0.0;
    int max_cycles = 200;
};

/// Geometric multigrid for A x = rhs with A the discrete Laplacian of a
/// given grid/boundary-kind pair.  Levels are formed by halving the interval
/// count while it stays even; the coarsest level is solved directly with a
/// cached sparse factorization.  Grids whose interval count is odd cannot be
/// coarsened at all, so the hierarchy degenerates to that direct solve.
class PoissonMultigrid {
public:
    PoissonMultigrid(const Grid& grid, const BoundarySpec& bc, SmootherConfig cfg);
    ~PoissonMultigrid();
    PoissonMultigrid(PoissonMultigrid&&) noexcept;

    /// Solves A x = rhs (interior vector).  Appends the relative residual
    /// after each V-cycle to residual_history when given.
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs,
                          std::vector<double>* residual_history = nullptr) const;

    int levels() const;
    const SmootherConfig& config() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace splitpde
