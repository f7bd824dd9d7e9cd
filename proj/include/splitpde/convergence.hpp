#pragma once

#include <map>
#include <string>
#include <vector>

#include "splitpde/problems.hpp"

namespace splitpde {

/// Trapezoidal-rule discrete L2(Omega) norm over the closed grid
/// (boundary nodes with half weights, corners with quarter weights in 2D).
double l2_norm_trapezoid(const StateField& u);

/// max over the trajectory's checkpoint times of the trapezoidal L2 norm of
/// the difference to the reference.  Checkpoint times must line up with the
/// reference's (uniformly spaced) ones.
double error_norm(const Trajectory& traj, const Trajectory& ref);

/// Least-squares slope of log(err) against log(tau).
double fit_order(const std::vector<std::pair<double, double>>& tau_err);

struct ConvergenceRow {
    Scheme scheme = Scheme::Strang;
    double tau = 0.0;
    double error = 0.0;  // NaN on failure
    long diffusion_flows = 0;
    long reaction_flows = 0;
    std::string status = "ok";  // "ok" or "failed: <reason>"

    bool ok() const { return status == "ok"; }
    long total_flows() const { return diffusion_flows + reaction_flows; }
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    std::map<Scheme, double> fitted_order;  // over non-failed rows
    // metadata
    std::string problem_label;
    int grid_n = 0;
    int dim = 1;
    double T = 0.0;
    double tau_ref = 0.0;
    std::string backend;
    double krylov_tol = 0.0;

    std::vector<ConvergenceRow> rows_for(Scheme s) const;
};

struct SweepConfig {
    std::vector<Scheme> schemes;
    std::vector<double> tau_list;  // empty: problem default
    double tau_ref = 0.0;          // 0: problem default
    bool backend_auto = true;      // dense when it fits, else Krylov
    MatFunBackend backend;         // used when backend_auto is false
    int reaction_substeps = 5;
    SmootherConfig smoother;
    double corrector_cap = 1e8;
    int strang_ordering = 3;
    bool fuse = true;               // fuse the schemes that allow it
    bool use_analytic_m3 = true;    // problem's closed-form M3 corrector when present
    int grid_n_override = 0;        // 0: problem default
};

/// Builds the scheme configuration run_convergence would use (also handy for
/// single runs from the CLI).
SchemeConfig make_scheme_config(const ProblemSpec& p, Scheme s, double tau,
                                const SweepConfig& cfg, int n_total);

/// Computes the RK4 reference once, then integrates every (scheme, tau)
/// pair; failed runs are recorded as rows with status "failed:...".
ConvergenceReport run_convergence(const ProblemSpec& p, const SweepConfig& cfg);

/// CSV: header scheme,tau,error,diffusion_flows,reaction_flows,status with
/// %.15e numeric fields and LF line endings.
void emit_csv(const ConvergenceReport& report, const std::string& path);
std::string csv_string(const ConvergenceReport& report);
ConvergenceReport parse_csv_string(const std::string& text);

/// Per-scheme (tau, error) blocks plus order-1 and order-2 guide lines
/// anchored at the coarsest resolved point.
void emit_plotdata(const ConvergenceReport& report, const std::string& path);

}  // namespace splitpde
