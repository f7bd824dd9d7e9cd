#include "splitpde/corrector.hpp"

#include <cmath>
#include <string>

namespace splitpde {

namespace {

double relative_trace_residual(const DiscreteDiffusion& d, const StateField& q,
                               const Eigen::VectorXd& requested, int* worst = nullptr) {
    const Eigen::VectorXd actual = d.boundary_operator(q);
    const double scale = std::max(requested.cwiseAbs().maxCoeff(), 1e-14);
    double rel = 0.0;
    for (Eigen::Index k = 0; k < requested.size(); ++k) {
        const double e = std::abs(actual[k] - requested[k]) / scale;
        if (e > rel) {
            rel = e;
            if (worst) *worst = static_cast<int>(k);
        }
    }
    return rel;
}

}  // namespace

Eigen::VectorXd boundary_trace_m5a(const DiscreteDiffusion& d, const StateField& u_n,
                                   const StateField& w, double tau) {
    if (tau <= 0.0) throw ConfigError("boundary_trace_m5a: tau must be positive");
    return (2.0 / tau) * (d.boundary_operator(w) - d.boundary_operator(u_n));
}

Eigen::VectorXd boundary_trace_m5b(const DiscreteDiffusion& d, const StateField& w,
                                   const Eigen::VectorXd& b_n, double tau) {
    if (tau <= 0.0) throw ConfigError("boundary_trace_m5b: tau must be positive");
    if (b_n.size() != static_cast<Eigen::Index>(d.boundary_nodes().size()))
        throw DimensionError("boundary_trace_m5b: boundary data length mismatch");
    return (2.0 / tau) * (d.boundary_operator(w) - b_n);
}

Eigen::VectorXd boundary_trace_m3(const DiscreteDiffusion& d, const ReactionTerm& f,
                                  const StateField& u_n) {
    StateField fu(u_n.grid);
    f.eval(u_n, fu);
    return d.boundary_operator(fu);
}

Corrector zero_corrector(const Grid& g) {
    Corrector c;
    c.q = StateField(g);
    c.provenance = Corrector::Provenance::Zero;
    return c;
}

Corrector extend_analytic(const DiscreteDiffusion& d,
                          const std::function<double(double, double)>& expr,
                          const Eigen::VectorXd& requested_trace, double rel_tol) {
    Corrector c;
    c.q = sample_field(d.grid, expr);
    if (!c.q.all_finite()) throw NumericalError("extend_analytic: expression not finite on grid");
    int worst = 0;
    c.trace_residual = relative_trace_residual(d, c.q, requested_trace, &worst);
    if (c.trace_residual > rel_tol) {
        const BoundaryNode& bn = d.boundary_nodes()[worst];
        throw TraceMismatchError(
            std::string("extend_analytic: trace mismatch on face ") + face_name(bn.face) +
                " (relative discrepancy " + std::to_string(c.trace_residual) + ")",
            c.trace_residual);
    }
    c.provenance = Corrector::Provenance::Analytic;
    return c;
}

HarmonicExtender::HarmonicExtender(const DiscreteDiffusion& d, SmootherConfig cfg)
    : d_(&d), mg_(d.grid, d.bc, cfg) {}

Corrector HarmonicExtender::extend(const Eigen::VectorXd& trace,
                                   std::vector<double>* residual_history) const {
    const DiscreteDiffusion& d = *d_;
    if (trace.size() != static_cast<Eigen::Index>(d.boundary_nodes().size()))
        throw DimensionError("HarmonicExtender: trace length mismatch");

    // Discrete harmonic extension: A q + c(trace) = 0 on the interior.
    const Eigen::VectorXd rhs = -d.forcing_from_node_data(trace);
    Corrector c;
    c.q = StateField(d.grid);
    c.q.set_interior(mg_.solve(rhs, residual_history));
    d.reconstruct_boundary_from_data(c.q, trace);
    if (!c.q.all_finite()) throw NumericalError("HarmonicExtender: non-finite extension");
    c.trace_residual = relative_trace_residual(d, c.q, trace);
    c.provenance = Corrector::Provenance::Harmonic;
    return c;
}

}  // namespace splitpde
