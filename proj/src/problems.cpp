#include "splitpde/problems.hpp"

#include <cmath>

namespace splitpde {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> dyadic_taus(double tau0, int kmin, int kmax) {
    std::vector<double> taus;
    for (int k = kmin; k <= kmax; ++k) taus.push_back(tau0 * std::pow(2.0, -k));
    return taus;
}

// Directional derivative along the inward normal at a boundary node,
// one-sided. Uses the 6th-order forward stencil when enough nodes exist so
// that consistent smooth data passes a 1e-8 gate on production grids.
double inward_derivative(const StateField& u, const Grid& g, const BoundaryNode& bn, Face f,
                         int* order) {
    int i0 = bn.i, j0 = bn.j, di = 0, dj = 0, avail = 0;
    double h = 0.0;
    switch (f) {
        case Face::Left: di = 1; h = g.dx[0]; avail = g.nx() + 2; break;
        case Face::Right: di = -1; h = g.dx[0]; avail = g.nx() + 2; break;
        case Face::Bottom: dj = 1; h = g.dx[1]; avail = g.ny() + 2; break;
        case Face::Top: dj = -1; h = g.dx[1]; avail = g.ny() + 2; break;
    }
    auto s = [&](int k) { return u.v[g.cidx(i0 + k * di, j0 + k * dj)]; };
    if (avail >= 7) {
        static const double c[7] = {-49.0 / 20, 6.0, -15.0 / 2, 20.0 / 3, -15.0 / 4, 6.0 / 5,
                                    -1.0 / 6};
        double acc = 0.0;
        for (int k = 0; k < 7; ++k) acc += c[k] * s(k);
        if (order) *order = 6;
        return acc / h;
    }
    if (order) *order = 2;
    return (-3.0 * s(0) + 4.0 * s(1) - s(2)) / (2.0 * h);
}

void check_initial_consistency(const DiscreteDiffusion& d, const StateField& u0, double tol) {
    for (const BoundaryNode& bn : d.boundary_nodes()) {
        for (int which = 0; which < (bn.face2 != bn.face ? 2 : 1); ++which) {
            const Face f = which == 0 ? bn.face : bn.face2;
            const double s = which == 0 ? bn.s : bn.s2;
            const FaceCondition& fc = d.bc.at(f);
            double lhs = fc.alpha * u0.v[bn.ci];
            double gate = tol;
            if (fc.has_derivative()) {
                int order = 2;
                lhs -= fc.beta * inward_derivative(u0, d.grid, bn, f, &order);
                // allow for the validation stencil's own truncation error
                const double h =
                    (f == Face::Left || f == Face::Right) ? d.grid.dx[0] : d.grid.dx[1];
                gate = std::max(tol, (order == 6 ? 30.0 * std::pow(h, 6) : 50.0 * h * h));
            }
            const double b = fc.data(s, 0.0);
            if (std::abs(lhs - b) > gate * std::max(1.0, std::abs(b)))
                throw ConfigError(std::string("initial condition violates boundary data on ") +
                                  face_name(f) + " face");
        }
    }
}

ReactionTerm make_integro_reaction(const Grid& g) {
    // f(u)(x) = -int_0^1 u(s)^4 / (1+|x-s|)^2 ds by the trapezoidal rule
    // over all closed-grid nodes; quadrature weights folded into the kernel.
    const int n = g.closed_count();
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i) {
        const double xi = g.x(i);
        for (int j = 0; j < n; ++j) {
            const double w = (j == 0 || j == n - 1) ? 0.5 * g.dx[0] : g.dx[0];
            const double r = 1.0 + std::abs(xi - g.x(j));
            K(i, j) = w / (r * r);
        }
    }
    ReactionTerm f;
    f.eval = [K](const StateField& u, StateField& out) {
        const Eigen::VectorXd u4 = u.v.array().square().square();
        out.v.noalias() = -(K * u4);
    };
    return f;
}

}  // namespace

Grid ProblemSpec::make_grid() const {
    return dim == 1 ? Grid::line(n_interior) : Grid::square(n_interior, n_interior);
}

DiscreteDiffusion ProblemSpec::discretize() const { return build_laplacian(make_grid(), bc); }

StateField ProblemSpec::initial_state(const DiscreteDiffusion& d, double tol) const {
    StateField u = sample_field(d.grid, initial);
    check_initial_consistency(d, u, tol);
    d.reconstruct_boundary(u, 0.0);
    return u;
}

std::vector<ProblemSpec> builtin_problems() {
    std::vector<ProblemSpec> out;

    auto constant = [](double v) { return [v](double, double) { return v; }; };

    for (double m : {1.0, 5.0}) {
        ProblemSpec p;
        p.name = "quadratic1d";
        p.label = "quadratic1d(m=" + std::to_string(static_cast<int>(m)) + ")";
        p.dim = 1;
        p.n_interior = 500;
        p.T = 0.1;
        p.param = m;
        p.tau_list = dyadic_taus(0.02, 0, 6);
        p.tau_ref = 0.02 * std::pow(2.0, -14);
        p.bc = BoundarySpec::line(FaceCondition::dirichlet(constant(1.0)),
                                  FaceCondition::neumann(constant(1.0)));
        p.initial = [](double x, double) {
            return 1.0 + 2.0 / kPi - (2.0 / kPi) * std::cos(0.5 * kPi * x);
        };
        p.make_reaction = [m](const Grid& g) {
            StateField c(g);
            c.v.setConstant(m);
            return ReactionTerm::quadratic(c);
        };
        p.m3_analytic = [m](const StateField& u_n, const DiscreteDiffusion& d) {
            // q_n = m + 2 m x u_n(1): value m at the Dirichlet end, normal
            // derivative 2 m u_n(1) at the Neumann end.
            const double u1 = u_n.v[d.grid.cidx(d.grid.nx() + 1)];
            AnalyticCorrector ac;
            ac.expr = [m, u1](double x, double) { return m + 2.0 * m * x * u1; };
            ac.trace = Eigen::VectorXd(2);
            ac.trace[0] = m;
            ac.trace[1] = 2.0 * m * u1;
            return ac;
        };
        out.push_back(std::move(p));
    }

    {
        ProblemSpec p;
        p.name = "integro1d";
        p.label = "integro1d";
        p.dim = 1;
        p.n_interior = 500;
        p.T = 0.1;
        p.param = 0.0;
        p.tau_list = dyadic_taus(0.02, 0, 6);
        p.tau_ref = 0.02 * std::pow(2.0, -14);
        p.bc = BoundarySpec::line(
            FaceCondition::dirichlet([](double, double t) { return 2.0 * (2.0 - t); }),
            FaceCondition::neumann(constant(0.0)));
        p.initial = [](double x, double) { return 2.0 * (std::cos(kPi * x) + 1.0); };
        p.make_reaction = make_integro_reaction;
        out.push_back(std::move(p));
    }

    for (double M : {1.0, 100.0}) {
        ProblemSpec p;
        p.name = "stiff2d";
        p.label = "stiff2d(M=" + std::to_string(static_cast<int>(M)) + ")";
        p.dim = 2;
        p.n_interior = 127;  // dx = 1/128
        p.T = 0.1;
        p.param = M;
        p.tau_list = dyadic_taus(0.1, 0, 8);
        p.tau_ref = 0.1 * std::pow(2.0, -14);
        const double e1 = std::exp(1.0);
        p.bc = BoundarySpec::square(
            FaceCondition::dirichlet([](double y, double) { return 0.5 * (1.0 + std::exp(y)); }),
            FaceCondition::neumann(constant(0.5 * e1)),
            FaceCondition::neumann(constant(-0.5)),
            FaceCondition::neumann(constant(0.5 * e1)));
        p.initial = [](double x, double y) { return 0.5 * (std::exp(x) + std::exp(y)); };
        p.make_reaction = [M](const Grid& g) {
            StateField c = sample_field(g, [M](double x, double y) {
                return 1.0 - M * std::sin(kPi * x) * std::sin(kPi * y);
            });
            return ReactionTerm::quadratic(c);
        };
        out.push_back(std::move(p));
    }

    return out;
}

ProblemSpec find_problem(const std::string& name, double param) {
    for (ProblemSpec& p : builtin_problems()) {
        if (p.name != name) continue;
        if (p.name == "integro1d" || p.param == param) return std::move(p);
    }
    throw ConfigError("unknown problem: " + name + " (param " + std::to_string(param) + ")");
}

void apply_scale(ProblemSpec& p, const std::string& scale) {
    if (scale == "paper") return;
    if (scale != "desk") throw ConfigError("unknown scale: " + scale);
    if (p.dim == 2) {
        p.n_interior = 64;
        p.tau_ref = 0.1 * std::pow(2.0, -12);
        p.tau_list = dyadic_taus(0.1, 2, 8);
    }
}

}  // namespace splitpde
