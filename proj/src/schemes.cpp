#include "splitpde/schemes.hpp"

#include <cmath>

namespace splitpde {

const char* scheme_token(Scheme s) {
    switch (s) {
        case Scheme::Strang: return "strang";
        case Scheme::StrangM3: return "m3";
        case Scheme::StrangM5a: return "m5a";
        case Scheme::StrangM5b: return "m5b";
        case Scheme::RK4Ref: return "rk4ref";
    }
    return "?";
}

std::optional<Scheme> scheme_from_token(const std::string& token) {
    if (token == "strang") return Scheme::Strang;
    if (token == "m3") return Scheme::StrangM3;
    if (token == "m5a") return Scheme::StrangM5a;
    if (token == "m5b") return Scheme::StrangM5b;
    if (token == "rk4ref") return Scheme::RK4Ref;
    return std::nullopt;
}

bool scheme_supports_fusion(Scheme s, int strang_ordering) {
    if (s == Scheme::StrangM5b) return true;
    if (s == Scheme::Strang) return strang_ordering == 3;
    return false;
}

int SchemeConfig::steps() const {
    if (tau <= 0.0 || T <= 0.0) throw ConfigError("scheme: tau and T must be positive");
    const double ratio = T / tau;
    const long n = std::lround(ratio);
    if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio)
        throw ConfigError("scheme: T/tau must be a positive integer");
    return static_cast<int>(n);
}

void SchemeConfig::validate() const {
    steps();
    if (strang_ordering != 2 && strang_ordering != 3)
        throw ConfigError("scheme: strang_ordering must be 2 or 3");
    if (fused && !scheme_supports_fusion(scheme, strang_ordering))
        throw ConfigError("scheme: fusion only applies where outer reaction half-steps merge");
    if (reaction_substeps < 1) throw ConfigError("scheme: reaction_substeps must be >= 1");
    if (scheme == Scheme::StrangM3 && corrector.variant == CorrectorVariant::None)
        throw ConfigError("scheme: StrangM3 needs an M3 corrector rule");
    if ((scheme == Scheme::StrangM5a && corrector.variant != CorrectorVariant::M5a &&
         corrector.variant != CorrectorVariant::None) ||
        (scheme == Scheme::StrangM5b && corrector.variant != CorrectorVariant::M5b &&
         corrector.variant != CorrectorVariant::None))
        throw ConfigError("scheme: corrector variant does not match the scheme");
}

Integrator::Integrator(const DiscreteDiffusion& d, const ReactionTerm& f, SchemeConfig cfg)
    : d_(d), f_(f), cfg_(std::move(cfg)), engine_(cfg_.backend, d.A) {
    cfg_.validate();
    if (cfg_.corrector.variant != CorrectorVariant::None &&
        cfg_.corrector.extension == ExtensionKind::Harmonic)
        extender_.emplace(d_, cfg_.corrector.smoother);
}

Corrector Integrator::build_corrector(const StateField& u_n, const StateField* w, double t_n) {
    const CorrectorRule& rule = cfg_.corrector;
    if (rule.variant == CorrectorVariant::None) return zero_corrector(d_.grid);

    Eigen::VectorXd trace;
    switch (rule.variant) {
        case CorrectorVariant::M3:
            if (rule.extension == ExtensionKind::Analytic) {
                if (!rule.analytic_builder)
                    throw ConfigError("corrector: analytic extension without a builder");
                const AnalyticCorrector ac = rule.analytic_builder(u_n, d_);
                Corrector c = extend_analytic(d_, ac.expr, ac.trace, rule.analytic_trace_tol);
                if (c.q.v.cwiseAbs().maxCoeff() > rule.bound_cap)
                    throw NumericalError("corrector: bound cap exceeded");
                return c;
            }
            trace = boundary_trace_m3(d_, f_, u_n);
            break;
        case CorrectorVariant::M5a:
            if (!w) throw ConfigError("corrector: M5a needs the reaction half-flow output");
            trace = boundary_trace_m5a(d_, u_n, *w, cfg_.tau);
            break;
        case CorrectorVariant::M5b:
            if (!w) throw ConfigError("corrector: M5b needs the reaction half-flow output");
            trace = boundary_trace_m5b(d_, *w, d_.boundary_data(t_n), cfg_.tau);
            break;
        case CorrectorVariant::None:
            break;
    }

    Corrector c;
    if (rule.extension == ExtensionKind::Analytic) {
        if (!rule.analytic_builder)
            throw ConfigError("corrector: analytic extension without a builder");
        const AnalyticCorrector ac = rule.analytic_builder(u_n, d_);
        c = extend_analytic(d_, ac.expr, trace, rule.analytic_trace_tol);
    } else {
        c = extender_->extend(trace);
    }
    if (c.q.v.cwiseAbs().maxCoeff() > rule.bound_cap)
        throw NumericalError("corrector: bound cap exceeded");
    return c;
}

StateField Integrator::step_strang(const StateField& u, double t_n, FlowCounters& ctr) {
    const double tau = cfg_.tau;
    if (cfg_.strang_ordering == 3) {
        StateField w = reaction_flow(f_, u, 0.5 * tau, cfg_.reaction_substeps, ctr);
        StateField v = diffusion_flow(d_, engine_, w, t_n, tau, nullptr, ctr);
        return reaction_flow(f_, v, 0.5 * tau, cfg_.reaction_substeps, ctr);
    }
    StateField v = diffusion_flow(d_, engine_, u, t_n, 0.5 * tau, nullptr, ctr);
    StateField w = reaction_flow(f_, v, tau, cfg_.reaction_substeps, ctr);
    return diffusion_flow(d_, engine_, w, t_n + 0.5 * tau, 0.5 * tau, nullptr, ctr);
}

StateField Integrator::step_m3(const StateField& u, double t_n, FlowCounters& ctr,
                               Corrector* q_out) {
    const double tau = cfg_.tau;
    Corrector q = build_corrector(u, nullptr, t_n);
    const Eigen::VectorXd qint = q.q.interior();
    StateField v1 = diffusion_flow(d_, engine_, u, t_n, 0.5 * tau, &qint, ctr);
    StateField m = reaction_minus_q_flow(f_, q.q, v1, tau, cfg_.reaction_substeps, ctr);
    StateField out = diffusion_flow(d_, engine_, m, t_n + 0.5 * tau, 0.5 * tau, &qint, ctr);
    if (q_out) *q_out = std::move(q);
    return out;
}

StateField Integrator::step_m5(const StateField& u, double t_n, FlowCounters& ctr,
                               Corrector* q_out) {
    const double tau = cfg_.tau;
    StateField w = reaction_flow(f_, u, 0.5 * tau, cfg_.reaction_substeps, ctr);
    Corrector q = build_corrector(u, &w, t_n);
    const Eigen::VectorXd qint = q.q.interior();
    StateField wt = projection_flow(q.q, w, 0.5 * tau);
    StateField v = diffusion_flow(d_, engine_, wt, t_n, tau, &qint, ctr);
    StateField vt = projection_flow(q.q, v, 0.5 * tau);
    StateField out = reaction_flow(f_, vt, 0.5 * tau, cfg_.reaction_substeps, ctr);
    if (q_out) *q_out = std::move(q);
    return out;
}

void Integrator::record(Trajectory& traj, const Corrector& q) const {
    traj.corrector_norms.push_back(q.q.v.cwiseAbs().maxCoeff());
    traj.corrector_trace_residuals.push_back(q.trace_residual);
}

void Integrator::check_counters(const Trajectory& traj, int n) const {
    long ed = 0, er = 0;
    switch (cfg_.scheme) {
        case Scheme::Strang:
            ed = cfg_.fused ? n : (cfg_.strang_ordering == 3 ? n : 2L * n);
            er = cfg_.fused ? n + 1 : (cfg_.strang_ordering == 3 ? 2L * n : n);
            break;
        case Scheme::StrangM3:
            ed = 2L * n;
            er = n;
            break;
        case Scheme::StrangM5a:
            ed = n;
            er = 2L * n;
            break;
        case Scheme::StrangM5b:
            ed = n;
            er = cfg_.fused ? n + 1 : 2L * n;
            break;
        case Scheme::RK4Ref:
            return;
    }
    if (traj.counters.diffusion_flows != ed || traj.counters.reaction_flows != er)
        throw std::logic_error("integrate: flow counters violate the per-scheme cost law");
}

Trajectory Integrator::integrate(const StateField& u0) {
    cfg_.validate();
    if (cfg_.scheme == Scheme::RK4Ref)
        throw ConfigError("integrate: use rk4_reference for the reference scheme");
    const int N = cfg_.steps();
    const double tau = cfg_.tau;

    Trajectory traj;
    traj.times.reserve(N + 1);
    traj.states.reserve(N + 1);

    StateField u = u0;
    d_.reconstruct_boundary(u, 0.0);
    traj.times.push_back(0.0);
    traj.states.push_back(u);

    auto fail_at = [](int step, const std::exception& e) {
        throw NumericalError("step " + std::to_string(step) + ": " + e.what());
    };

    if (!cfg_.fused) {
        for (int k = 0; k < N; ++k) {
            const double t_n = k * tau;
            try {
                Corrector q;
                switch (cfg_.scheme) {
                    case Scheme::Strang:
                        u = step_strang(u, t_n, traj.counters);
                        break;
                    case Scheme::StrangM3:
                        u = step_m3(u, t_n, traj.counters, &q);
                        record(traj, q);
                        break;
                    case Scheme::StrangM5a:
                    case Scheme::StrangM5b:
                        u = step_m5(u, t_n, traj.counters, &q);
                        record(traj, q);
                        break;
                    default: break;
                }
            } catch (const NumericalError& e) {
                fail_at(k, e);
            }
            if (!u.all_finite())
                throw NumericalError("step " + std::to_string(k) + ": non-finite state");
            traj.times.push_back((k + 1) * tau);
            traj.states.push_back(u);
        }
        check_counters(traj, N);
        return traj;
    }

    // Fused runs merge the trailing and leading reaction half-steps of
    // consecutive steps into one full flow (Strang with reaction outermost,
    // and M5b, whose trace needs only w_n and b_n).  Checkpoint states u_n
    // are still produced for error measurement, through observer half-flows
    // that are not part of the composed method and are left uncounted.
    FlowCounters observer;
    const bool m5 = cfg_.scheme == Scheme::StrangM5b;
    try {
        StateField w = reaction_flow(f_, u, 0.5 * tau, cfg_.reaction_substeps, traj.counters);
        for (int k = 0; k < N; ++k) {
            const double t_n = k * tau;
            StateField vt(d_.grid);
            if (m5) {
                Corrector q = build_corrector(u, &w, t_n);
                const Eigen::VectorXd qint = q.q.interior();
                StateField wt = projection_flow(q.q, w, 0.5 * tau);
                StateField v = diffusion_flow(d_, engine_, wt, t_n, tau, &qint, traj.counters);
                vt = projection_flow(q.q, v, 0.5 * tau);
                record(traj, q);
            } else {
                vt = diffusion_flow(d_, engine_, w, t_n, tau, nullptr, traj.counters);
            }
            if (k < N - 1) {
                u = reaction_flow(f_, vt, 0.5 * tau, cfg_.reaction_substeps, observer);
                w = reaction_flow(f_, vt, tau, cfg_.reaction_substeps, traj.counters);
            } else {
                u = reaction_flow(f_, vt, 0.5 * tau, cfg_.reaction_substeps, traj.counters);
            }
            if (!u.all_finite())
                throw NumericalError("non-finite state");
            traj.times.push_back((k + 1) * tau);
            traj.states.push_back(u);
        }
    } catch (const NumericalError& e) {
        fail_at(static_cast<int>(traj.states.size()) - 1, e);
    }
    check_counters(traj, N);
    return traj;
}

Trajectory rk4_reference(const DiscreteDiffusion& d, const ReactionTerm& f,
                         const StateField& u0, double tau_ref, double T,
                         double checkpoint_dt) {
    if (tau_ref <= 0.0 || T <= 0.0 || checkpoint_dt <= 0.0)
        throw ConfigError("rk4_reference: times must be positive");
    const double spc = checkpoint_dt / tau_ref;
    const long steps_per_cp = std::lround(spc);
    if (steps_per_cp < 1 || std::abs(spc - static_cast<double>(steps_per_cp)) > 1e-9 * spc)
        throw ConfigError("rk4_reference: tau_ref must divide the checkpoint interval");
    const double ncp_real = T / checkpoint_dt;
    const long ncp = std::lround(ncp_real);
    if (ncp < 1 || std::abs(ncp_real - static_cast<double>(ncp)) > 1e-9 * ncp_real)
        throw ConfigError("rk4_reference: checkpoint interval must divide T");

    const double h = tau_ref;
    const int n = d.n_total();

    StateField scratch(d.grid), fu(d.grid);
    auto rhs = [&](double t, const Eigen::VectorXd& y, Eigen::VectorXd& out) {
        scratch.set_interior(y);
        d.reconstruct_boundary(scratch, t);
        f.eval(scratch, fu);
        out.noalias() = d.A * y;
        out += d.forcing(t);
        fu.add_interior_to(out);
    };

    Trajectory traj;
    StateField u = u0;
    d.reconstruct_boundary(u, 0.0);
    traj.times.push_back(0.0);
    traj.states.push_back(u);

    Eigen::VectorXd y = u.interior();
    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), tmp(n);
    long step = 0;
    for (long cp = 1; cp <= ncp; ++cp) {
        for (long s = 0; s < steps_per_cp; ++s, ++step) {
            const double t = step * h;
            rhs(t, y, k1);
            tmp = y + (0.5 * h) * k1;
            rhs(t + 0.5 * h, tmp, k2);
            tmp = y + (0.5 * h) * k2;
            rhs(t + 0.5 * h, tmp, k3);
            tmp = y + h * k3;
            rhs(t + h, tmp, k4);
            y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!y.allFinite() || y.cwiseAbs().maxCoeff() > 1e12)
                throw NumericalError("rk4_reference: instability at step " + std::to_string(step));
        }
        const double t_cp = cp * checkpoint_dt;
        StateField out(d.grid);
        out.set_interior(y);
        d.reconstruct_boundary(out, t_cp);
        traj.times.push_back(t_cp);
        traj.states.push_back(std::move(out));
    }
    return traj;
}

}  // namespace splitpde
