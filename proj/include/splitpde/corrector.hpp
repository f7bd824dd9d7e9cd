#pragma once

#include <functional>
#include <memory>

#include "splitpde/flows.hpp"
#include "splitpde/multigrid.hpp"

namespace splitpde {

enum class CorrectorVariant { None, M3, M5a, M5b };
enum class ExtensionKind { Harmonic, Analytic };

/// A closed-form interior extension together with the boundary trace it was
/// designed to carry (one value per boundary node of the operator).
struct AnalyticCorrector {
    std::function<double(double, double)> expr;
    Eigen::VectorXd trace;
};

/// How the per-step corrector q_n is built: which boundary trace condition,
/// and how the trace is extended into the interior.
struct CorrectorRule {
    CorrectorVariant variant = CorrectorVariant::None;
    ExtensionKind extension = ExtensionKind::Harmonic;
    SmootherConfig smoother;
    double bound_cap = 1e8;          // ||q||_inf cap (correctors stay uniformly bounded)
    double analytic_trace_tol = 1e-8;
    /// Supplies the analytic extension for the current state when
    /// extension == Analytic (problem-specific closed forms).
    std::function<AnalyticCorrector(const StateField&, const DiscreteDiffusion&)> analytic_builder;
};

/// The corrector q_n as a full grid field with provenance and the achieved
/// trace residual (relative, infinity norm) as a diagnostic.
struct Corrector {
    enum class Provenance { Analytic, Harmonic, Zero };
    StateField q;
    Provenance provenance = Provenance::Zero;
    double trace_residual = 0.0;
};

/// Trace for the five-part splitting built from the reaction half-flow:
///   B q = (2/tau) (B w - B u_n),   w = phi^f_{tau/2}(u_n).
Eigen::VectorXd boundary_trace_m5a(const DiscreteDiffusion& d, const StateField& u_n,
                                   const StateField& w, double tau);

/// Variant subtracting the prescribed data instead of B u_n (enables the
/// fused implementation):  B q = (2/tau) (B w - b_n).
Eigen::VectorXd boundary_trace_m5b(const DiscreteDiffusion& d, const StateField& w,
                                   const Eigen::VectorXd& b_n, double tau);

/// Three-part modified splitting trace:  B q = B f(u_n).
Eigen::VectorXd boundary_trace_m3(const DiscreteDiffusion& d, const ReactionTerm& f,
                                  const StateField& u_n);

Corrector zero_corrector(const Grid& g);

/// Samples an analytic interior extension and verifies that its discrete
/// trace matches the requested one within rel_tol (relative to the trace
/// magnitude); throws TraceMismatchError naming the offending face.
Corrector extend_analytic(const DiscreteDiffusion& d,
                          const std::function<double(double, double)>& expr,
                          const Eigen::VectorXd& requested_trace, double rel_tol = 1e-8);

/// Approximately-harmonic interior extension: solves the discrete Laplace
/// equation with B q = trace via PoissonMultigrid.  Reusable across steps;
/// construction caches the level operators and coarse factorization.
class HarmonicExtender {
public:
    HarmonicExtender(const DiscreteDiffusion& d, SmootherConfig cfg);

    Corrector extend(const Eigen::VectorXd& trace,
                     std::vector<double>* residual_history = nullptr) const;

    const PoissonMultigrid& solver() const { return mg_; }

private:
    const DiscreteDiffusion* d_;
    PoissonMultigrid mg_;
};

}  // namespace splitpde
