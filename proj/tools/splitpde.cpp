// Command-line driver: problem/scheme listing, single integrations,
// convergence sweeps, and a quick self-test of the numerical kernels.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure.

#include <cmath>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "splitpde/convergence.hpp"

using namespace splitpde;

namespace {

struct Options {
    std::string problem = "quadratic1d";
    double m = 1.0;
    double M = 100.0;
    std::string scale = "paper";
    std::string schemes = "strang,m3,m5a,m5b";
    std::string scheme = "m5b";
    std::string out;
    std::string plotdata;
    double tau = 0.0;
    double T = 0.0;
    double tau_ref = 0.0;
    int n = 0;
    std::string backend = "auto";
    double krylov_tol = 1e-10;
    int krylov_max_dim = 64;
    int dense_cap = 2000;
    int substeps = 5;
    int ordering = 3;
    bool no_fuse = false;
    bool no_analytic_m3 = false;
    int mg_cycles = 2;
    int mg_pre = 3;
    int mg_post = 3;
    double mg_damping = 2.0 / 3.0;
    double mg_tol = 0.0;
    double corrector_cap = 1e8;
};

void add_problem_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--problem", o.problem, "quadratic1d | integro1d | stiff2d");
    cmd->add_option("--m", o.m, "quadratic1d nonlinearity strength (1 or 5)");
    cmd->add_option("--M", o.M, "stiff2d stiffness parameter (1 or 100)");
    cmd->add_option("--scale", o.scale, "paper | desk (desk shrinks the 2D runs)");
    cmd->add_option("--n", o.n, "interior grid nodes per axis (0: problem default)");
    cmd->add_option("--T", o.T, "final time (0: problem default)");
}

void add_numerics_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--backend", o.backend, "auto | dense | krylov");
    cmd->add_option("--krylov-tol", o.krylov_tol, "Krylov residual tolerance");
    cmd->add_option("--krylov-max-dim", o.krylov_max_dim, "Krylov subspace cap");
    cmd->add_option("--dense-cap", o.dense_cap, "largest operator for the dense backend");
    cmd->add_option("--substeps", o.substeps, "RK4 substeps per reaction flow");
    cmd->add_option("--ordering", o.ordering, "Strang ordering: 3 reaction-outer, 2 diffusion-outer");
    cmd->add_flag("--no-fuse", o.no_fuse, "disable merging of adjacent reaction half-steps");
    cmd->add_flag("--no-analytic-m3", o.no_analytic_m3,
                  "force the harmonic M3 corrector even when a closed form exists");
    cmd->add_option("--mg-cycles", o.mg_cycles, "multigrid V-cycles per corrector");
    cmd->add_option("--mg-pre", o.mg_pre, "pre-smoothing sweeps");
    cmd->add_option("--mg-post", o.mg_post, "post-smoothing sweeps");
    cmd->add_option("--mg-damping", o.mg_damping, "Jacobi damping factor");
    cmd->add_option("--mg-tol", o.mg_tol, "multigrid residual tolerance (0: fixed cycles)");
    cmd->add_option("--corrector-cap", o.corrector_cap, "corrector magnitude cap");
    cmd->add_option("--tau-ref", o.tau_ref, "reference RK4 step (0: problem default)");
}

ProblemSpec problem_from(const Options& o) {
    const double param = o.problem == "stiff2d" ? o.M : o.m;
    ProblemSpec p = find_problem(o.problem, param);
    apply_scale(p, o.scale);
    if (o.n > 0) p.n_interior = o.n;
    if (o.T > 0.0) p.T = o.T;
    return p;
}

SweepConfig sweep_from(const Options& o) {
    SweepConfig cfg;
    for (const std::string& tok : CLI::detail::split(o.schemes, ',')) {
        const auto s = scheme_from_token(tok);
        if (!s || *s == Scheme::RK4Ref) throw ConfigError("unknown scheme token: " + tok);
        cfg.schemes.push_back(*s);
    }
    cfg.tau_ref = o.tau_ref;
    if (o.backend == "auto") {
        cfg.backend_auto = true;
    } else if (o.backend == "dense" || o.backend == "krylov") {
        cfg.backend_auto = false;
        cfg.backend = o.backend == "dense" ? MatFunBackend::dense() : MatFunBackend::krylov();
    } else {
        throw ConfigError("unknown backend: " + o.backend);
    }
    cfg.backend.krylov_tol = o.krylov_tol;
    cfg.backend.krylov_max_dim = o.krylov_max_dim;
    cfg.backend.dense_cap = o.dense_cap;
    cfg.reaction_substeps = o.substeps;
    cfg.strang_ordering = o.ordering;
    cfg.fuse = !o.no_fuse;
    cfg.use_analytic_m3 = !o.no_analytic_m3;
    cfg.smoother.v_cycles = o.mg_cycles;
    cfg.smoother.pre_sweeps = o.mg_pre;
    cfg.smoother.post_sweeps = o.mg_post;
    cfg.smoother.damping = o.mg_damping;
    cfg.smoother.tol = o.mg_tol;
    cfg.corrector_cap = o.corrector_cap;
    return cfg;
}

int cmd_list() {
    std::printf("problems:\n");
    for (const ProblemSpec& p : builtin_problems())
        std::printf("  %-18s dim=%d  n=%d  T=%g  taus=%zu  tau_ref=%g\n", p.label.c_str(), p.dim,
                    p.n_interior, p.T, p.tau_list.size(), p.tau_ref);
    std::printf("schemes:\n");
    std::printf("  strang  classical Strang splitting (fusable, ordering 3)\n");
    std::printf("  m3      corrected splitting, correction from B f(u_n)\n");
    std::printf("  m5a     five-part splitting, correction from the reaction half-flow\n");
    std::printf("  m5b     five-part splitting, fusable variant using b(t_n)\n");
    std::printf("  rk4ref  method-of-lines RK4 reference\n");
    return 0;
}

int cmd_run(const Options& o) {
    ProblemSpec p = problem_from(o);
    const auto sopt = scheme_from_token(o.scheme);
    if (!sopt || *sopt == Scheme::RK4Ref) throw ConfigError("unknown scheme token: " + o.scheme);
    SweepConfig cfg = sweep_from(o);
    const double tau = o.tau > 0.0 ? o.tau : p.tau_list.front();

    const DiscreteDiffusion d = p.discretize();
    const ReactionTerm f = p.make_reaction(d.grid);
    const StateField u0 = p.initial_state(d);
    Integrator integ(d, f, make_scheme_config(p, *sopt, tau, cfg, d.n_total()));
    const Trajectory traj = integ.integrate(u0);
    const StateField& u = traj.final_state();

    std::FILE* out = o.out.empty() ? stdout : std::fopen(o.out.c_str(), "wb");
    if (!out) throw Error("run: cannot open " + o.out);
    const Grid& g = u.grid;
    if (g.dim == 1) {
        std::fprintf(out, "x,u\n");
        for (int i = 0; i <= g.nx() + 1; ++i)
            std::fprintf(out, "%.15e,%.15e\n", g.x(i), u.at(i));
    } else {
        std::fprintf(out, "x,y,u\n");
        for (int j = 0; j <= g.ny() + 1; ++j)
            for (int i = 0; i <= g.nx() + 1; ++i)
                std::fprintf(out, "%.15e,%.15e,%.15e\n", g.x(i), g.y(j), u.at(i, j));
    }
    if (out != stdout) std::fclose(out);
    std::fprintf(stderr, "%s %s: %d steps, tau=%g, flows: diffusion=%ld reaction=%ld\n",
                 p.label.c_str(), o.scheme.c_str(), integ.config().steps(), tau,
                 traj.counters.diffusion_flows, traj.counters.reaction_flows);
    return 0;
}

int cmd_converge(const Options& o) {
    ProblemSpec p = problem_from(o);
    SweepConfig cfg = sweep_from(o);
    const ConvergenceReport rep = run_convergence(p, cfg);

    const std::string out = o.out.empty() ? "report.csv" : o.out;
    emit_csv(rep, out);
    if (!o.plotdata.empty()) emit_plotdata(rep, o.plotdata);

    std::printf("%s  grid n=%d  T=%g  backend=%s  reference tau=%.3e\n", rep.problem_label.c_str(),
                rep.grid_n, rep.T, rep.backend.c_str(), rep.tau_ref);
    for (const auto& [s, order] : rep.fitted_order)
        std::printf("  %-7s fitted order %.3f\n", scheme_token(s), order);
    int failed = 0;
    for (const ConvergenceRow& r : rep.rows)
        if (!r.ok()) {
            ++failed;
            std::fprintf(stderr, "  %s tau=%.6e %s\n", scheme_token(r.scheme), r.tau,
                         r.status.c_str());
        }
    std::printf("wrote %s (%zu rows%s)\n", out.c_str(), rep.rows.size(),
                failed ? ", some failed (see stderr)" : "");
    return 0;
}

bool report(bool ok, const char* name) {
    std::printf("[%s] %s\n", ok ? "ok" : "FAIL", name);
    return ok;
}

int cmd_selftest() {
    bool all = true;

    {  // Dirichlet Laplacian eigenvalues on a small grid
        const Grid g = Grid::line(12);
        auto zero = [](double, double) { return 0.0; };
        const DiscreteDiffusion d = build_laplacian(
            g, BoundarySpec::line(FaceCondition::dirichlet(zero), FaceCondition::dirichlet(zero)));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(d.A)};
        double worst = 0.0;
        for (int k = 1; k <= 12; ++k) {
            const double lam =
                -4.0 / (g.dx[0] * g.dx[0]) * std::pow(std::sin(k * M_PI * g.dx[0] / 2.0), 2);
            worst = std::max(worst, std::abs(es.eigenvalues()[12 - k] - lam) / std::abs(lam));
        }
        all &= report(worst < 1e-12, "mesh: 1D Dirichlet eigenvalue formula");
    }

    {  // phi identities through both backends on a 1D Laplacian
        const Grid g = Grid::line(64);
        auto zero = [](double, double) { return 0.0; };
        const DiscreteDiffusion d = build_laplacian(
            g, BoundarySpec::line(FaceCondition::dirichlet(zero), FaceCondition::neumann(zero)));
        Eigen::VectorXd v(64);
        for (int i = 0; i < 64; ++i) v[i] = std::sin(0.1 * i) + 0.3 * std::cos(2.3 * i);
        bool ok = true;
        for (auto kind : {MatFunBackend::dense(), MatFunBackend::krylov()}) {
            MatFunEngine eng(kind, d.A);
            for (double tau : {1e-3, 1e-2}) {
                const Eigen::VectorXd e = eng.expm(tau, v), p1 = eng.phi1(tau, v),
                                      p2 = eng.phi2(tau, v);
                ok &= (tau * (d.A * p1) - (e - v)).norm() <= 1e-10 * v.norm();
                ok &= (tau * (d.A * p2) - (p1 - v)).norm() <= 1e-10 * v.norm();
            }
        }
        all &= report(ok, "matfun: phi identities (dense and Krylov)");
    }

    {  // steady state is a fixed point of the diffusion flow
        const Grid g = Grid::line(40);
        const DiscreteDiffusion d = build_laplacian(
            g, BoundarySpec::line(FaceCondition::dirichlet([](double, double) { return 1.0; }),
                                  FaceCondition::neumann([](double, double) { return 2.0; })));
        MatFunEngine eng(MatFunBackend::dense(), d.A);
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(d.A);
        const Eigen::VectorXd ustar = lu.solve(-d.forcing(0.0));
        StateField u(g);
        u.set_interior(ustar);
        d.reconstruct_boundary(u, 0.0);
        FlowCounters ctr;
        const StateField after = diffusion_flow(d, eng, u, 0.0, 0.05, nullptr, ctr);
        all &= report((after.v - u.v).cwiseAbs().maxCoeff() < 1e-9,
                      "flows: steady state fixed point");
    }

    {  // flow-count laws on a tiny quadratic problem
        ProblemSpec p = find_problem("quadratic1d", 1.0);
        p.n_interior = 16;
        const DiscreteDiffusion d = p.discretize();
        const ReactionTerm f = p.make_reaction(d.grid);
        const StateField u0 = p.initial_state(d);
        SweepConfig cfg;
        cfg.schemes = {Scheme::Strang, Scheme::StrangM3, Scheme::StrangM5a, Scheme::StrangM5b};
        bool ok = true;
        for (Scheme s : cfg.schemes) {
            Integrator integ(d, f, make_scheme_config(p, s, 0.02, cfg, d.n_total()));
            const Trajectory tr = integ.integrate(u0);  // counter laws asserted inside
            const long total = tr.counters.total();
            ok &= (s == Scheme::Strang || s == Scheme::StrangM5b) ? total == 11 : total == 15;
        }
        all &= report(ok, "schemes: flow-count laws (N=5)");
    }

    {  // trapezoidal L2 norm of sin(pi x)
        const StateField u =
            sample_field(Grid::line(500), [](double x, double) { return std::sin(M_PI * x); });
        all &= report(std::abs(l2_norm_trapezoid(u) - 1.0 / std::sqrt(2.0)) < 1e-5,
                      "harness: trapezoidal L2 norm");
    }

    return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Operator-splitting integrators for reaction-diffusion problems with "
                 "inhomogeneous boundary conditions"};
    app.require_subcommand(1);
    app.set_config("--config")->description("key = value file; flags take precedence");

    Options o;
    CLI::App* list = app.add_subcommand("list", "list problems and schemes");
    CLI::App* run = app.add_subcommand("run", "single integration, final-state dump");
    add_problem_options(run, o);
    add_numerics_options(run, o);
    run->add_option("--scheme", o.scheme, "strang | m3 | m5a | m5b");
    run->add_option("--tau", o.tau, "time step (0: coarsest problem default)");
    run->add_option("--out", o.out, "output CSV (default: stdout)");
    CLI::App* conv = app.add_subcommand("converge", "convergence sweep against an RK4 reference");
    add_problem_options(conv, o);
    add_numerics_options(conv, o);
    conv->add_option("--schemes", o.schemes, "comma-separated scheme tokens");
    conv->add_option("--out", o.out, "report CSV path (default report.csv)");
    conv->add_option("--plotdata", o.plotdata, "also write gnuplot-style blocks");
    CLI::App* self = app.add_subcommand("selftest", "run the built-in invariant checks");

    try {
        app.parse(argc, argv);
        if (list->parsed()) return cmd_list();
        if (run->parsed()) return cmd_run(o);
        if (conv->parsed()) return cmd_converge(o);
        if (self->parsed()) return cmd_selftest();
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const Error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 2;
    }
}
