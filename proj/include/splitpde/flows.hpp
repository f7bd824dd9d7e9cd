#pragma once

#include <functional>

#include "splitpde/field.hpp"
#include "splitpde/laplacian.hpp"
#include "splitpde/matfun.hpp"

namespace splitpde {

/// Full-flow application counts for the cost accounting of a run.
/// A fused double half-step counts once; projections are not counted.
struct FlowCounters {
    long diffusion_flows = 0;
    long reaction_flows = 0;
    long total() const { return diffusion_flows + reaction_flows; }
};

/// Source term f together with an optional exact flow of u' = f(u).
struct ReactionTerm {
    /// f(u) on the full closed-grid field (pointwise or nonlocal).
    std::function<void(const StateField& u, StateField& out)> eval;
    /// In-place exact flow u <- phi^f_t(u) when a closed form exists.
    std::function<void(StateField& u, double t)> analytic;
    double lipschitz_hint = 0.0;  // informational only

    bool has_analytic() const { return static_cast<bool>(analytic); }

    static ReactionTerm zero();
    /// f(u) = c(x) u^2 with nodewise coefficient c; exact flow
    /// u0 / (1 - c t u0), failing on finite-time blow-up.
    static ReactionTerm quadratic(const StateField& coeff);
};

/// phi^f_t(u0): analytic flow when available, otherwise classical RK4 with
/// `substeps` equal substeps.  Counts as one reaction flow.
StateField reaction_flow(const ReactionTerm& f, const StateField& u0, double t, int substeps,
                         FlowCounters& counters);

/// phi^{f-q}_t(u0) with q frozen in time; RK4 substepping.  One reaction flow.
StateField reaction_minus_q_flow(const ReactionTerm& f, const StateField& q,
                                 const StateField& u0, double t, int substeps,
                                 FlowCounters& counters);

/// phi^{-q}_t(u0) = u0 - t q, exact; not counted.
StateField projection_flow(const StateField& q, const StateField& u0, double t);

/// phi^{D+g}_tau(u0) honoring B u = b: advances u' = A u + c(t) + g over
/// [t0, t0+tau] with c fitted affinely on the step (exact for b linear in t),
///     u(tau) = e^{tau A} u0 + tau phi1(tau A)(g + c0) + tau^2 phi2(tau A) c1,
/// then reconstructs the boundary nodes at t0+tau.  One diffusion flow.
/// g may be null (plain diffusion).
StateField diffusion_flow(const DiscreteDiffusion& d, const MatFunEngine& eng,
                          const StateField& u0, double t0, double tau,
                          const Eigen::VectorXd* g, FlowCounters& counters);

}  // namespace splitpde
