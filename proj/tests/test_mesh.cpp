#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "oracles.hpp"
#include "splitpde/laplacian.hpp"

using namespace splitpde;

namespace {
constexpr double kPi = 3.14159265358979323846;

std::function<double(double, double)> constant(double v) {
    return [v](double, double) { return v; };
}

DiscreteDiffusion line_dd(int n, double bl = 0.0, double br = 0.0) {
    return build_laplacian(Grid::line(n),
                           BoundarySpec::line(FaceCondition::dirichlet(constant(bl)),
                                              FaceCondition::dirichlet(constant(br))));
}
}  // namespace

TEST_CASE("1D Dirichlet-Dirichlet, n=3: textbook tridiagonal, zero forcing") {
    const DiscreteDiffusion d = line_dd(3);
    const double s = 16.0;  // 1/dx^2, dx = 1/4
    const Eigen::MatrixXd A(d.A);
    Eigen::MatrixXd expect(3, 3);
    expect << -2, 1, 0, 1, -2, 1, 0, 1, -2;
    CHECK((A - s * expect).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK(d.forcing(0.0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(d.forcing(17.3).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("1D Dirichlet(1)/Neumann(1), n=3: hand ghost-elimination algebra") {
    const DiscreteDiffusion d = build_laplacian(
        Grid::line(3), BoundarySpec::line(FaceCondition::dirichlet(constant(1.0)),
                                          FaceCondition::neumann(constant(1.0))));
    const double dx = 0.25, s = 1.0 / (dx * dx);
    // Right boundary value solved from (3 u_b - 4 u_3 + u_2)/(2 dx) = b:
    //   u_b = (2 dx b + 4 u_3 - u_2) / 3
    // so the last row is ((2/3) u_2 - (2/3) u_3)/dx^2 + (2 dx/3) b / dx^2.
    Eigen::MatrixXd expect(3, 3);
    expect << -2 * s, s, 0, s, -2 * s, s, 0, (2.0 / 3) * s, -(2.0 / 3) * s;
    CHECK((Eigen::MatrixXd(d.A) - expect).cwiseAbs().maxCoeff() < 1e-12 * s);

    const Eigen::VectorXd c = d.forcing(0.0);
    CHECK(c[0] == doctest::Approx(s * 1.0));                     // Dirichlet b/dx^2
    CHECK(c[1] == 0.0);
    CHECK(c[2] == doctest::Approx((2.0 * dx / 3.0) * s * 1.0));  // ghost elimination
}

TEST_CASE("2D all-Dirichlet n=4: Kronecker sum of the 1D matrix") {
    const DiscreteDiffusion d1 = line_dd(4);
    const Grid g = Grid::square(4, 4);
    const DiscreteDiffusion d2 = build_laplacian(
        g, BoundarySpec::square(
               FaceCondition::dirichlet(constant(0.0)), FaceCondition::dirichlet(constant(0.0)),
               FaceCondition::dirichlet(constant(0.0)), FaceCondition::dirichlet(constant(0.0))));
    const Eigen::MatrixXd K = oracles::kron_sum(Eigen::MatrixXd(d1.A));
    CHECK((Eigen::MatrixXd(d2.A) - K).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("1D Dirichlet eigenvalues match -(4/dx^2) sin^2(k pi dx / 2)") {
    const int n = 14;
    const DiscreteDiffusion d = line_dd(n);
    const double dx = 1.0 / (n + 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(d.A)};
    for (int k = 1; k <= n; ++k) {
        const double lam = -4.0 / (dx * dx) * std::pow(std::sin(k * kPi * dx / 2.0), 2);
        CHECK(es.eigenvalues()[n - k] == doctest::Approx(lam).epsilon(1e-12));
    }
}

TEST_CASE("operator consistency: sin(pi x) reproduced at second order") {
    std::vector<std::pair<double, double>> pts;
    for (int n : {31, 63, 127, 255, 511}) {
        const DiscreteDiffusion d = line_dd(n);
        const Grid& g = d.grid;
        Eigen::VectorXd u(n);
        for (int i = 1; i <= n; ++i) u[i - 1] = std::sin(kPi * g.x(i));
        const Eigen::VectorXd err = d.A * u + kPi * kPi * u;
        pts.emplace_back(g.dx[0], err.cwiseAbs().maxCoeff());
    }
    const double slope = oracles::slope_loglog(pts);
    CHECK(slope > 1.9);
    CHECK(slope < 2.1);
}

TEST_CASE("manufactured Robin solution converges at second order") {
    // u(x) = x^2: u'' = 2, u(0) = 0, and alpha u(1) + beta u'(1) = 8
    // for alpha = 2, beta = 3.
    std::vector<std::pair<double, double>> pts;
    for (int n : {32, 64, 128, 256}) {
        const DiscreteDiffusion d = build_laplacian(
            Grid::line(n), BoundarySpec::line(FaceCondition::dirichlet(constant(0.0)),
                                              FaceCondition::robin(2.0, 3.0, constant(8.0))));
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(d.A);
        const Eigen::VectorXd rhs = Eigen::VectorXd::Constant(n, 2.0) - d.forcing(0.0);
        const Eigen::VectorXd x = lu.solve(rhs);
        double worst = 0.0;
        for (int i = 1; i <= n; ++i)
            worst = std::max(worst, std::abs(x[i - 1] - d.grid.x(i) * d.grid.x(i)));
        pts.emplace_back(d.grid.dx[0], worst);
    }
    const double slope = oracles::slope_loglog(pts);
    CHECK(slope > 1.8);
    CHECK(slope < 2.3);
}

TEST_CASE("mixed-closure spectrum stays real and non-positive") {
    const DiscreteDiffusion d = build_laplacian(
        Grid::line(12), BoundarySpec::line(FaceCondition::dirichlet(constant(0.0)),
                                           FaceCondition::neumann(constant(0.0))));
    Eigen::EigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(d.A)};
    const double scale = Eigen::MatrixXd(d.A).cwiseAbs().maxCoeff();
    for (int i = 0; i < 12; ++i) {
        CHECK(std::abs(es.eigenvalues()[i].imag()) < 1e-10 * scale);
        CHECK(es.eigenvalues()[i].real() < 1e-12 * scale);
    }
}

TEST_CASE("forcing is linear in the boundary data") {
    auto make = [](double lam) {
        return build_laplacian(
            Grid::line(20),
            BoundarySpec::line(
                FaceCondition::dirichlet([lam](double, double t) { return lam * (2.0 - t); }),
                FaceCondition::neumann([lam](double, double t) { return lam * (1.0 + t); })));
    };
    const DiscreteDiffusion d1 = make(1.0), d3 = make(3.7);
    for (double t : {0.0, 0.05, 0.1}) {
        const Eigen::VectorXd c1 = d1.forcing(t), c3 = d3.forcing(t);
        CHECK((c3 - 3.7 * c1).cwiseAbs().maxCoeff() < 1e-13 * c1.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("boundary reconstruction") {
    SUBCASE("Dirichlet face gets the data value exactly") {
        const DiscreteDiffusion d = build_laplacian(
            Grid::line(16),
            BoundarySpec::line(FaceCondition::dirichlet([](double, double t) { return 1.0 + t; }),
                               FaceCondition::neumann(constant(0.0))));
        StateField u(d.grid);
        d.reconstruct_boundary(u, 0.25);
        CHECK(u.at(0) == 1.25);
    }
    SUBCASE("linear field through a Neumann face is exact") {
        const DiscreteDiffusion d = build_laplacian(
            Grid::line(16), BoundarySpec::line(FaceCondition::dirichlet(constant(0.0)),
                                               FaceCondition::neumann(constant(1.0))));
        StateField u = sample_field(d.grid, [](double x, double) { return x; });
        u.at(d.grid.nx() + 1) = -99.0;
        d.reconstruct_boundary(u, 0.0);
        CHECK(u.at(d.grid.nx() + 1) == doctest::Approx(1.0).epsilon(1e-13));
    }
    SUBCASE("quadratic field reconstructs at second order") {
        double prev = 0.0;
        for (int n : {32, 64}) {
            const DiscreteDiffusion d = build_laplacian(
                Grid::line(n), BoundarySpec::line(FaceCondition::dirichlet(constant(0.0)),
                                                  FaceCondition::neumann(constant(2.0))));
            StateField u = sample_field(d.grid, [](double x, double) { return x * x; });
            u.at(n + 1) = -99.0;
            d.reconstruct_boundary(u, 0.0);
            const double err = std::abs(u.at(n + 1) - 1.0);
            if (prev > 0.0) CHECK(prev / err > 3.0);  // ~4x per halving
            prev = err;
        }
    }
}

TEST_CASE("2D corner rules") {
    auto bc = BoundarySpec::square(
        FaceCondition::dirichlet(constant(2.0)), FaceCondition::neumann(constant(0.0)),
        FaceCondition::neumann(constant(0.0)), FaceCondition::neumann(constant(0.0)));
    const DiscreteDiffusion d = build_laplacian(Grid::square(8, 8), bc);
    StateField u = sample_field(d.grid, [](double, double) { return 5.0; });
    d.reconstruct_boundary(u, 0.0);
    // Dirichlet-owned corners take the Dirichlet data; the two
    // Neumann-Neumann corners average one-sided reconstructions, which for a
    // constant field with zero data reproduce the constant.
    CHECK(u.at(0, 0) == 2.0);
    CHECK(u.at(0, 9) == 2.0);
    CHECK(u.at(9, 0) == doctest::Approx(5.0).epsilon(1e-13));
    CHECK(u.at(9, 9) == doctest::Approx(5.0).epsilon(1e-13));

    // trace of a linear field: exact values on every face
    StateField w = sample_field(d.grid, [](double x, double y) { return x + 2.0 * y; });
    const Eigen::VectorXd tr = d.boundary_operator(w);
    const auto& nodes = d.boundary_nodes();
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const BoundaryNode& bn = nodes[k];
        auto one = [&](Face f) {
            switch (f) {
                case Face::Left: return -1.0;  // du/dn = -du/dx
                case Face::Right: return 1.0;
                case Face::Bottom: return -2.0;
                case Face::Top: return 2.0;
            }
            return 0.0;
        };
        double expect = 0.0;
        if (bn.face == Face::Left)
            expect = w.v[bn.ci];  // Dirichlet: alpha u
        else if (bn.corner && bn.face2 != bn.face)
            expect = 0.5 * (one(bn.face) + one(bn.face2));
        else
            expect = one(bn.face);
        CHECK(tr[k] == doctest::Approx(expect).epsilon(1e-11));
    }
}

TEST_CASE("validation errors") {
    CHECK_THROWS_AS(
        (void)build_laplacian(Grid::line(8),
                              BoundarySpec::square(FaceCondition::dirichlet(constant(0)),
                                                   FaceCondition::dirichlet(constant(0)),
                                                   FaceCondition::dirichlet(constant(0)),
                                                   FaceCondition::dirichlet(constant(0)))),
        DimensionError);
    FaceCondition bad;
    bad.kind = BcKind::Robin;
    bad.alpha = 1.0;
    bad.beta = 0.0;
    bad.data = constant(0.0);
    BoundarySpec s;
    s.dim = 1;
    s.face[0] = FaceCondition::dirichlet(constant(0.0));
    s.face[1] = bad;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    CHECK_THROWS_AS((void)Grid::line(1), ConfigError);
}
