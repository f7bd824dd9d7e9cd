// Test-only oracles, independent of the library's evaluation paths:
// truncated-Taylor matrix functions with compensated summation, an implicit
// midpoint (Crank-Nicolson) marcher for affine ODEs, a plain-vector RK4,
// and a hand-rolled Kronecker-sum assembly.
#pragma once

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace oracles {

// sum_k (tau A)^k v / (k + shift)!  for shift = 0 (exp), 1 (phi1), 2 (phi2),
// 100 terms, Kahan-compensated accumulation per component.
inline Eigen::VectorXd taylor_phi(const Eigen::MatrixXd& A, double tau, const Eigen::VectorXd& v,
                                  int shift, int terms = 100) {
    const Eigen::Index n = v.size();
    Eigen::VectorXd sum(n), comp = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd term = v;
    double fact = 1.0;
    for (int j = 2; j <= shift; ++j) fact *= j;
    term /= fact;  // k = 0 term: v / shift!
    sum = term;
    for (int k = 1; k <= terms; ++k) {
        term = (A * term) * (tau / (k + shift));
        for (Eigen::Index i = 0; i < n; ++i) {
            const double y = term[i] - comp[i];
            const double t = sum[i] + y;
            comp[i] = (t - sum[i]) - y;
            sum[i] = t;
        }
    }
    return sum;
}

inline Eigen::VectorXd taylor_expm(const Eigen::MatrixXd& A, double tau, const Eigen::VectorXd& v) {
    return taylor_phi(A, tau, v, 0);
}
inline Eigen::VectorXd taylor_phi1(const Eigen::MatrixXd& A, double tau, const Eigen::VectorXd& v) {
    return taylor_phi(A, tau, v, 1);
}
inline Eigen::VectorXd taylor_phi2(const Eigen::MatrixXd& A, double tau, const Eigen::VectorXd& v) {
    return taylor_phi(A, tau, v, 2);
}

// Deterministic symmetric negative-definite test matrices.
inline Eigen::MatrixXd random_negdef(int n, unsigned seed, double lmin = -4.0,
                                     double lmax = -0.05) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd G(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = g(rng);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    const Eigen::MatrixXd Q = qr.householderQ();
    std::uniform_real_distribution<double> u(lmin, lmax);
    Eigen::VectorXd lam(n);
    for (int i = 0; i < n; ++i) lam[i] = u(rng);
    return Q * lam.asDiagonal() * Q.transpose();
}

inline Eigen::VectorXd random_vector(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = g(rng);
    return v;
}

// Implicit midpoint marching for u' = A u + r(t) over [t0, t0+tau].
inline Eigen::VectorXd implicit_midpoint(const Eigen::SparseMatrix<double>& A,
                                         const std::function<Eigen::VectorXd(double)>& r,
                                         Eigen::VectorXd u, double t0, double tau, int steps) {
    const double h = tau / steps;
    Eigen::SparseMatrix<double> I(A.rows(), A.cols());
    I.setIdentity();
    Eigen::SparseMatrix<double> lhs = I - (0.5 * h) * A;
    Eigen::SparseMatrix<double> rhs = I + (0.5 * h) * A;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(lhs);
    for (int k = 0; k < steps; ++k) {
        const double tm = t0 + (k + 0.5) * h;
        u = lu.solve((rhs * u + h * r(tm)).eval());
    }
    return u;
}

// Plain-vector classical RK4 for u' = rhs(u).
inline Eigen::VectorXd rk4(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& rhs,
                           Eigen::VectorXd u, double t, int steps) {
    const double h = t / steps;
    for (int k = 0; k < steps; ++k) {
        const Eigen::VectorXd k1 = rhs(u);
        const Eigen::VectorXd k2 = rhs(u + 0.5 * h * k1);
        const Eigen::VectorXd k3 = rhs(u + 0.5 * h * k2);
        const Eigen::VectorXd k4 = rhs(u + h * k3);
        u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return u;
}

// A (+) A for the interior ordering k = (i-1) + (j-1) n (x fastest).
inline Eigen::MatrixXd kron_sum(const Eigen::MatrixXd& A1) {
    const int n = static_cast<int>(A1.rows());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * n, n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const int row = i + j * n;
            for (int k = 0; k < n; ++k) {
                K(row, k + j * n) += A1(i, k);  // x coupling
                K(row, i + k * n) += A1(j, k);  // y coupling
            }
        }
    return K;
}

inline double slope_loglog(const std::vector<std::pair<double, double>>& pts) {
    double sx = 0, sy = 0;
    const int n = static_cast<int>(pts.size());
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = std::log(pts[i].first);
        ys[i] = std::log(pts[i].second);
        sx += xs[i];
        sy += ys[i];
    }
    double num = 0, den = 0;
    for (int i = 0; i < n; ++i) {
        num += (xs[i] - sx / n) * (ys[i] - sy / n);
        den += (xs[i] - sx / n) * (xs[i] - sx / n);
    }
    return num / den;
}

}  // namespace oracles
