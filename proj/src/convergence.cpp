#include "splitpde/convergence.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace splitpde {

double l2_norm_trapezoid(const StateField& u) {
    const Grid& g = u.grid;
    double acc = 0.0;
    if (g.dim == 1) {
        const int nb = g.nx() + 1;
        for (int i = 0; i <= nb; ++i) {
            const double w = (i == 0 || i == nb) ? 0.5 : 1.0;
            acc += w * u.at(i) * u.at(i);
        }
        return std::sqrt(acc * g.dx[0]);
    }
    const int nbx = g.nx() + 1, nby = g.ny() + 1;
    for (int j = 0; j <= nby; ++j) {
        const double wj = (j == 0 || j == nby) ? 0.5 : 1.0;
        for (int i = 0; i <= nbx; ++i) {
            const double wi = (i == 0 || i == nbx) ? 0.5 : 1.0;
            acc += wi * wj * u.at(i, j) * u.at(i, j);
        }
    }
    return std::sqrt(acc * g.dx[0] * g.dx[1]);
}

double error_norm(const Trajectory& traj, const Trajectory& ref) {
    if (ref.times.size() < 2) throw DimensionError("error_norm: reference too short");
    const double dt = ref.times[1] - ref.times[0];
    double worst = 0.0;
    StateField diff = traj.states.front();
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const double t = traj.times[k];
        const long idx = std::lround(t / dt);
        if (idx < 0 || idx >= static_cast<long>(ref.times.size()) ||
            std::abs(ref.times[idx] - t) > 1e-9 * std::max(1.0, std::abs(t)))
            throw DimensionError("error_norm: checkpoint time not on the reference grid");
        diff.v = traj.states[k].v - ref.states[idx].v;
        worst = std::max(worst, l2_norm_trapezoid(diff));
    }
    return worst;
}

double fit_order(const std::vector<std::pair<double, double>>& tau_err) {
    double sx = 0, sy = 0;
    const int n = static_cast<int>(tau_err.size());
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = std::log(tau_err[i].first);
        ys[i] = std::log(tau_err[i].second);
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double num = 0, den = 0;
    for (int i = 0; i < n; ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    return num / den;
}

std::vector<ConvergenceRow> ConvergenceReport::rows_for(Scheme s) const {
    std::vector<ConvergenceRow> out;
    for (const ConvergenceRow& r : rows)
        if (r.scheme == s) out.push_back(r);
    return out;
}

SchemeConfig make_scheme_config(const ProblemSpec& p, Scheme s, double tau,
                                const SweepConfig& cfg, int n_total) {
    SchemeConfig sc;
    sc.scheme = s;
    sc.tau = tau;
    sc.T = p.T;
    sc.strang_ordering = cfg.strang_ordering;
    sc.fused = cfg.fuse && scheme_supports_fusion(s, cfg.strang_ordering);
    sc.reaction_substeps = cfg.reaction_substeps;
    if (cfg.backend_auto) {
        sc.backend = n_total <= MatFunBackend{}.dense_cap ? MatFunBackend::dense()
                                                          : MatFunBackend::krylov();
    } else {
        sc.backend = cfg.backend;
    }
    sc.corrector.smoother = cfg.smoother;
    sc.corrector.bound_cap = cfg.corrector_cap;
    switch (s) {
        case Scheme::StrangM3:
            sc.corrector.variant = CorrectorVariant::M3;
            if (cfg.use_analytic_m3 && p.m3_analytic) {
                sc.corrector.extension = ExtensionKind::Analytic;
                sc.corrector.analytic_builder = p.m3_analytic;
            }
            break;
        case Scheme::StrangM5a:
            sc.corrector.variant = CorrectorVariant::M5a;
            break;
        case Scheme::StrangM5b:
            sc.corrector.variant = CorrectorVariant::M5b;
            break;
        default:
            break;
    }
    return sc;
}

ConvergenceReport run_convergence(const ProblemSpec& problem, const SweepConfig& cfg) {
    if (cfg.schemes.empty()) throw ConfigError("run_convergence: empty scheme list");
    ProblemSpec p = problem;
    if (cfg.grid_n_override > 0) p.n_interior = cfg.grid_n_override;
    const std::vector<double>& taus = cfg.tau_list.empty() ? p.tau_list : cfg.tau_list;
    if (taus.empty()) throw ConfigError("run_convergence: empty tau list");
    const double tau_ref = cfg.tau_ref > 0.0 ? cfg.tau_ref : p.tau_ref;

    double tau_min = taus.front();
    for (double t : taus) {
        if (t <= 0.0 || t > p.T + 1e-12) throw ConfigError("run_convergence: bad tau");
        tau_min = std::min(tau_min, t);
    }
    for (double t : taus) {
        const double r = t / tau_min;
        if (std::abs(r - std::lround(r)) > 1e-9 * r)
            throw ConfigError("run_convergence: tau values must align on the finest one");
    }

    const DiscreteDiffusion d = p.discretize();
    const ReactionTerm f = p.make_reaction(d.grid);
    const StateField u0 = p.initial_state(d);

    ConvergenceReport rep;
    rep.problem_label = p.label;
    rep.grid_n = p.n_interior;
    rep.dim = p.dim;
    rep.T = p.T;
    rep.tau_ref = tau_ref;
    {
        const MatFunBackend b = cfg.backend_auto
                                    ? (d.n_total() <= MatFunBackend{}.dense_cap
                                           ? MatFunBackend::dense()
                                           : MatFunBackend::krylov())
                                    : cfg.backend;
        rep.backend = b.kind == BackendKind::Dense ? "dense" : "krylov";
        rep.krylov_tol = b.krylov_tol;
    }

    const Trajectory ref = rk4_reference(d, f, u0, tau_ref, p.T, tau_min);

    for (Scheme s : cfg.schemes) {
        std::vector<std::pair<double, double>> fit_pts;
        for (double tau : taus) {
            ConvergenceRow row;
            row.scheme = s;
            row.tau = tau;
            try {
                Integrator integ(d, f, make_scheme_config(p, s, tau, cfg, d.n_total()));
                const Trajectory traj = integ.integrate(u0);
                row.error = error_norm(traj, ref);
                row.diffusion_flows = traj.counters.diffusion_flows;
                row.reaction_flows = traj.counters.reaction_flows;
                fit_pts.emplace_back(tau, row.error);
            } catch (const NumericalError& e) {
                row.error = std::numeric_limits<double>::quiet_NaN();
                row.status = std::string("failed: ") + e.what();
            }
            rep.rows.push_back(std::move(row));
        }
        rep.fitted_order[s] = fit_order(fit_pts);
    }
    return rep;
}

namespace {
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15e", v);
    return buf;
}
}  // namespace

std::string csv_string(const ConvergenceReport& report) {
    if (report.rows.empty()) throw ConfigError("emit_report: empty report");
    std::string out = "scheme,tau,error,diffusion_flows,reaction_flows,status\n";
    for (const ConvergenceRow& r : report.rows) {
        out += scheme_token(r.scheme);
        out += ',';
        out += fmt(r.tau);
        out += ',';
        out += fmt(r.error);
        out += ',';
        out += std::to_string(r.diffusion_flows);
        out += ',';
        out += std::to_string(r.reaction_flows);
        out += ',';
        out += r.status;
        out += '\n';
    }
    return out;
}

void emit_csv(const ConvergenceReport& report, const std::string& path) {
    const std::string text = csv_string(report);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("emit_csv: cannot open " + path);
    f << text;
    if (!f.good()) throw Error("emit_csv: write failed for " + path);
}

ConvergenceReport parse_csv_string(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "scheme,tau,error,diffusion_flows,reaction_flows,status")
        throw Error("parse_csv: bad header");
    ConvergenceReport rep;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        ConvergenceRow row;
        std::getline(ls, tok, ',');
        const auto s = scheme_from_token(tok);
        if (!s) throw Error("parse_csv: bad scheme token " + tok);
        row.scheme = *s;
        std::getline(ls, tok, ',');
        row.tau = std::stod(tok);
        std::getline(ls, tok, ',');
        row.error = std::stod(tok);
        std::getline(ls, tok, ',');
        row.diffusion_flows = std::stol(tok);
        std::getline(ls, tok, ',');
        row.reaction_flows = std::stol(tok);
        std::getline(ls, row.status);
        rep.rows.push_back(std::move(row));
    }
    std::map<Scheme, std::vector<std::pair<double, double>>> pts;
    for (const ConvergenceRow& r : rep.rows)
        if (r.ok()) pts[r.scheme].emplace_back(r.tau, r.error);
    for (const auto& [s, v] : pts) rep.fitted_order[s] = fit_order(v);
    return rep;
}

void emit_plotdata(const ConvergenceReport& report, const std::string& path) {
    if (report.rows.empty()) throw ConfigError("emit_report: empty report");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("emit_plotdata: cannot open " + path);

    double tau0 = 0.0, err0 = 0.0;
    for (const ConvergenceRow& r : report.rows)
        if (r.ok()) tau0 = std::max(tau0, r.tau);
    for (const ConvergenceRow& r : report.rows)
        if (r.ok() && r.tau == tau0) err0 = std::max(err0, r.error);

    std::map<Scheme, bool> seen;
    for (const ConvergenceRow& r : report.rows) seen[r.scheme] = true;
    for (const auto& [s, _] : seen) {
        f << "# scheme " << scheme_token(s) << "\n";
        for (const ConvergenceRow& r : report.rows)
            if (r.scheme == s && r.ok()) f << fmt(r.tau) << " " << fmt(r.error) << "\n";
        f << "\n";
    }
    if (tau0 > 0.0) {
        for (int p : {1, 2}) {
            f << "# guide order" << p << "\n";
            for (const ConvergenceRow& r : report.rows) {
                if (r.scheme != report.rows.front().scheme) continue;
                const double g = err0 * std::pow(r.tau / tau0, p);
                f << fmt(r.tau) << " " << fmt(g) << "\n";
            }
            f << "\n";
        }
    }
    if (!f.good()) throw Error("emit_plotdata: write failed for " + path);
}

}  // namespace splitpde
