#include "splitpde/flows.hpp"

#include <cmath>
#include <string>

namespace splitpde {

ReactionTerm ReactionTerm::zero() {
    ReactionTerm f;
    f.eval = [](const StateField&, StateField& out) { out.v.setZero(); };
    f.analytic = [](StateField&, double) {};
    f.lipschitz_hint = 0.0;
    return f;
}

ReactionTerm ReactionTerm::quadratic(const StateField& coeff) {
    ReactionTerm f;
    const StateField c = coeff;
    f.eval = [c](const StateField& u, StateField& out) {
        out.v.array() = c.v.array() * u.v.array().square();
    };
    f.analytic = [c](StateField& u, double t) {
        // u' = c u^2  =>  u(t) = u0 / (1 - c t u0), blow-up when the
        // denominator crosses zero.
        for (Eigen::Index k = 0; k < u.v.size(); ++k) {
            const double denom = 1.0 - c.v[k] * t * u.v[k];
            if (denom <= 1e-12)
                throw BlowUpError("quadratic reaction flow blow-up at node " + std::to_string(k),
                                  static_cast<int>(k));
            u.v[k] /= denom;
        }
    };
    return f;
}

namespace {

// Classical RK4 on u' = rhs(u) over duration t with `substeps` equal steps.
template <class Rhs>
void rk4_inplace(StateField& u, double t, int substeps, Rhs&& rhs) {
    const double h = t / substeps;
    StateField k1 = u, k2 = u, k3 = u, k4 = u, tmp = u;
    for (int s = 0; s < substeps; ++s) {
        rhs(u, k1);
        tmp.v = u.v + (0.5 * h) * k1.v;
        rhs(tmp, k2);
        tmp.v = u.v + (0.5 * h) * k2.v;
        rhs(tmp, k3);
        tmp.v = u.v + h * k3.v;
        rhs(tmp, k4);
        u.v += (h / 6.0) * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    }
}

void check_flow_inputs(const ReactionTerm& f, const StateField& u0, double t, int substeps) {
    if (t < 0.0) throw ConfigError("reaction flow: negative duration");
    if (!f.has_analytic() && substeps < 1)
        throw ConfigError("reaction flow: substeps must be >= 1 without an analytic flow");
    if (!f.eval) throw ConfigError("reaction flow: missing evaluator");
    (void)u0;
}

}  // namespace

StateField reaction_flow(const ReactionTerm& f, const StateField& u0, double t, int substeps,
                         FlowCounters& counters) {
    check_flow_inputs(f, u0, t, substeps);
    StateField u = u0;
    if (f.has_analytic()) {
        f.analytic(u, t);
    } else {
        rk4_inplace(u, t, substeps, [&](const StateField& y, StateField& out) { f.eval(y, out); });
    }
    if (!u.all_finite()) throw NumericalError("reaction flow produced non-finite values");
    ++counters.reaction_flows;
    return u;
}

StateField reaction_minus_q_flow(const ReactionTerm& f, const StateField& q,
                                 const StateField& u0, double t, int substeps,
                                 FlowCounters& counters) {
    if (substeps < 1) throw ConfigError("reaction flow: substeps must be >= 1");
    if (t < 0.0) throw ConfigError("reaction flow: negative duration");
    if (!q.grid.same_shape(u0.grid)) throw DimensionError("reaction_minus_q_flow: grid mismatch");
    StateField u = u0;
    rk4_inplace(u, t, substeps, [&](const StateField& y, StateField& out) {
        f.eval(y, out);
        out.v -= q.v;
    });
    if (!u.all_finite()) throw NumericalError("reaction flow produced non-finite values");
    ++counters.reaction_flows;
    return u;
}

StateField projection_flow(const StateField& q, const StateField& u0, double t) {
    if (!q.grid.same_shape(u0.grid)) throw DimensionError("projection_flow: grid mismatch");
    StateField u = u0;
    u.v -= t * q.v;
    return u;
}

StateField diffusion_flow(const DiscreteDiffusion& d, const MatFunEngine& eng,
                          const StateField& u0, double t0, double tau,
                          const Eigen::VectorXd* g, FlowCounters& counters) {
    if (tau <= 0.0) throw ConfigError("diffusion flow: tau must be positive");
    if (!u0.grid.same_shape(d.grid)) throw DimensionError("diffusion_flow: grid mismatch");
    if (g && g->size() != d.n_total()) throw DimensionError("diffusion_flow: forcing length mismatch");

    const Eigen::VectorXd c0 = d.forcing(t0);
    const Eigen::VectorXd c1 = (d.forcing(t0 + tau) - c0) / tau;
    Eigen::VectorXd b1 = c0;
    if (g) b1 += *g;

    StateField out = u0;
    out.set_interior(eng.affine_advance(tau, u0.interior(), b1, c1));
    d.reconstruct_boundary(out, t0 + tau);
    ++counters.diffusion_flows;
    return out;
}

}  // namespace splitpde
