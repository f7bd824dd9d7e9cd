#include "splitpde/matfun.hpp"

#include <cmath>
#include <optional>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

namespace splitpde {

double phi1_scalar(double z) {
    if (std::abs(z) < 0.5) {
        // sum z^k / (k+1)!
        double term = 1.0, sum = 1.0;
        for (int k = 1; k <= 24; ++k) {
            term *= z / (k + 1);
            sum += term;
            if (std::abs(term) < 1e-20 * std::abs(sum)) break;
        }
        return sum;
    }
    return std::expm1(z) / z;
}

double phi2_scalar(double z) {
    if (std::abs(z) < 0.5) {
        // sum z^k / (k+2)!
        double term = 0.5, sum = 0.5;
        for (int k = 1; k <= 24; ++k) {
            term *= z / (k + 2);
            sum += term;
            if (std::abs(term) < 1e-20 * std::abs(sum)) break;
        }
        return sum;
    }
    return (std::expm1(z) - z) / (z * z);
}

namespace {

// Diagonal scaling d with  D A D^{-1}  symmetric, if one exists.  Works for
// the one-dimensional closures and their Kronecker sums; detected, not assumed.
std::optional<Eigen::VectorXd> symmetrizer(const Eigen::MatrixXd& A) {
    const int n = static_cast<int>(A.rows());
    const double scale = A.cwiseAbs().maxCoeff();
    const double structural_tol = scale * 1e-14;
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    std::vector<int> stack;
    for (int root = 0; root < n; ++root) {
        if (d[root] != 0.0) continue;
        d[root] = 1.0;
        stack.push_back(root);
        while (!stack.empty()) {
            const int i = stack.back();
            stack.pop_back();
            for (int j = 0; j < n; ++j) {
                if (j == i || std::abs(A(i, j)) <= structural_tol) continue;
                if (std::abs(A(j, i)) <= structural_tol) return std::nullopt;
                const double ratio = A(i, j) / A(j, i);
                if (ratio <= 0.0) return std::nullopt;
                const double dj = d[i] * std::sqrt(ratio);
                if (d[j] == 0.0) {
                    d[j] = dj;
                    stack.push_back(j);
                } else if (std::abs(d[j] - dj) > 1e-8 * std::abs(dj)) {
                    return std::nullopt;  // inconsistent cycle
                }
            }
        }
    }
    const double dmax = d.maxCoeff(), dmin = d.minCoeff();
    if (dmin <= 0.0 || dmax / dmin > 1e6) return std::nullopt;
    return d;
}

}  // namespace

struct MatFunEngine::Impl {
    MatFunBackend cfg;
    Eigen::SparseMatrix<double> A;
    int n = 0;

    // Dense spectral path: A = D^{-1} Q diag(lambda) Q^T D
    bool spectral = false;
    Eigen::VectorXd d, dinv, lambda;
    Eigen::MatrixXd Q;

    void init_dense() {
        Eigen::MatrixXd Ad(A);
        if (auto dv = symmetrizer(Ad)) {
            d = *dv;
            dinv = d.cwiseInverse();
            Eigen::MatrixXd S = d.asDiagonal() * Ad * dinv.asDiagonal();
            S = 0.5 * (S + S.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
            if (es.info() == Eigen::Success) {
                Q = es.eigenvectors();
                lambda = es.eigenvalues();
                spectral = true;
            }
        }
    }

    // w = e^{tau A} u0 + tau phi1 b1 + tau^2 phi2 b2 through the
    // eigenbasis; null pointers mean "that term is absent".
    Eigen::VectorXd spectral_advance(double tau, const Eigen::VectorXd* u0,
                                     const Eigen::VectorXd* b1,
                                     const Eigen::VectorXd* b2) const {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
        auto add = [&](const Eigen::VectorXd& v, auto&& f) {
            Eigen::VectorXd w = Q.transpose() * (d.cwiseProduct(v));
            for (int i = 0; i < n; ++i) w[i] *= f(tau * lambda[i]);
            acc += w;
        };
        if (u0) add(*u0, [](double z) { return std::exp(z); });
        if (b1) add(*b1, [&](double z) { return tau * phi1_scalar(z); });
        if (b2) add(*b2, [&](double z) { return tau * tau * phi2_scalar(z); });
        return dinv.cwiseProduct(Q * acc);
    }

    // Fallback for operators the spectral route cannot handle: one dense
    // scaling-and-squaring Pade exponential of the (n+2) augmented block
    //   [[tau A, b2', b1'], [0, 0, 1], [0, 0, 0]]
    // whose exponential applied to [u0; 0; 1] advances the affine ODE.
    Eigen::VectorXd pade_advance(double tau, const Eigen::VectorXd* u0,
                                 const Eigen::VectorXd* b1,
                                 const Eigen::VectorXd* b2) const {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + 2, n + 2);
        M.topLeftCorner(n, n) = tau * Eigen::MatrixXd(A);
        if (b2) M.block(0, n, n, 1) = tau * (*b2);
        if (b1) M.block(0, n + 1, n, 1) = tau * (*b1);
        M(n, n + 1) = tau;
        const Eigen::MatrixXd E = M.exp();
        Eigen::VectorXd y0 = Eigen::VectorXd::Zero(n + 2);
        if (u0) y0.head(n) = *u0;
        y0[n + 1] = 1.0;
        return (E * y0).head(n);
    }

    Eigen::VectorXd dense_advance(double tau, const Eigen::VectorXd* u0,
                                  const Eigen::VectorXd* b1,
                                  const Eigen::VectorXd* b2) const {
        if (spectral) return spectral_advance(tau, u0, b1, b2);
        return pade_advance(tau, u0, b1, b2);
    }

    // ---- Krylov path -------------------------------------------------

    // Arnoldi time-marching for y' = A y + b1 + s b2 on the augmented
    // operator; restarts by halving the substep when the generalized
    // residual stalls at the subspace cap.
    Eigen::VectorXd krylov_advance(double tau, const Eigen::VectorXd* u0,
                                   const Eigen::VectorXd* b1,
                                   const Eigen::VectorXd* b2) const {
        const int p = b2 ? 2 : (b1 ? 1 : 0);
        const int N = n + p;
        const int mmax = std::min(cfg.krylov_max_dim, N);
        const double tol_sub = 0.1 * cfg.krylov_tol;

        Eigen::VectorXd y = Eigen::VectorXd::Zero(N);
        if (u0) y.head(n) = *u0;
        if (p == 1) y[n] = 1.0;           // state [u; y2], u' = A u + y2 b1
        if (p == 2) y[n + 1] = 1.0;       // state [u; y1; y2], y1' = y2, y1(0)=0

        auto apply = [&](const Eigen::VectorXd& z, Eigen::VectorXd& w) {
            w.head(n).noalias() = A * z.head(n);
            if (p == 1) w.head(n) += z[n] * (*b1);
            if (p == 2) {
                if (b2) w.head(n) += z[n] * (*b2);
                if (b1) w.head(n) += z[n + 1] * (*b1);
                w[n] = z[n + 1];
                w[n + 1] = 0.0;
            } else if (p == 1) {
                w[n] = 0.0;
            }
        };

        Eigen::MatrixXd V(N, mmax + 1);
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(mmax + 1, mmax);
        Eigen::VectorXd w(N);

        double t_done = 0.0;
        double h_hint = tau;  // carries the last workable substep forward
        int guard = 0;
        while (t_done < tau * (1.0 - 1e-14)) {
            if (++guard > 200000)
                throw KrylovError("krylov: substep count overflow (operator too stiff for the "
                                  "subspace cap)",
                                  -1.0);
            const double rem = tau - t_done;
            const double beta = y.norm();
            if (beta == 0.0) break;  // zero stays zero
            V.col(0) = y / beta;

            int m = 0;
            double hscale = 0.0;
            bool happy = false;
            double h = std::min(rem, h_hint);
            bool accepted = false;

            auto try_step = [&](int mm, double hh) -> double {
                const Eigen::MatrixXd Hm = hh * H.topLeftCorner(mm, mm);
                const Eigen::MatrixXd F = Hm.exp();
                const double rho = happy ? 0.0 : H(mm, mm - 1) * std::abs(F(mm - 1, 0));
                if (rho <= tol_sub || happy) {
                    y = beta * (V.leftCols(mm) * F.col(0));
                    t_done += hh;
                    accepted = true;
                }
                return rho;
            };

            while (m < mmax && !accepted) {
                apply(V.col(m), w);
                // modified Gram-Schmidt with one reorthogonalization pass
                for (int pass = 0; pass < 2; ++pass) {
                    for (int i = 0; i <= m; ++i) {
                        const double c = V.col(i).dot(w);
                        if (pass == 0)
                            H(i, m) = c;
                        else
                            H(i, m) += c;
                        w -= c * V.col(i);
                    }
                }
                const double hnext = w.norm();
                hscale = std::max({hscale, hnext, H.col(m).head(m + 1).cwiseAbs().maxCoeff()});
                H(m + 1, m) = hnext;
                ++m;
                if (hnext <= 1e-13 * hscale) {
                    happy = true;
                    try_step(m, rem);
                    break;
                }
                V.col(m) = w / hnext;
                if (m % 8 == 0 || m == mmax) try_step(m, h);
            }

            if (!accepted) {
                // subspace cap reached: halve the substep, reusing the basis
                double rho = -1.0;
                for (int k = 0; k < 60 && !accepted; ++k) {
                    h *= 0.5;
                    rho = try_step(m, h);
                }
                if (!accepted)
                    throw KrylovError("krylov: no convergence within max subspace dimension", rho);
            }
            h_hint = 2.0 * h;
        }

        Eigen::VectorXd out = y.head(n);
        return out;
    }

    Eigen::VectorXd advance(double tau, const Eigen::VectorXd* u0, const Eigen::VectorXd* b1,
                            const Eigen::VectorXd* b2) const {
        if (cfg.kind == BackendKind::Dense) return dense_advance(tau, u0, b1, b2);
        return krylov_advance(tau, u0, b1, b2);
    }
};

MatFunEngine::MatFunEngine(const MatFunBackend& backend, Eigen::SparseMatrix<double> A)
    : impl_(std::make_unique<Impl>()) {
    if (A.rows() != A.cols()) throw DimensionError("matfun: operator must be square");
    impl_->cfg = backend;
    impl_->A = std::move(A);
    impl_->A.makeCompressed();
    impl_->n = static_cast<int>(impl_->A.rows());
    if (backend.kind == BackendKind::Dense) {
        if (impl_->n > backend.dense_cap)
            throw ConfigError("matfun: dense backend refused, operator exceeds dense_cap");
        impl_->init_dense();
    }
}

MatFunEngine::~MatFunEngine() = default;
MatFunEngine::MatFunEngine(MatFunEngine&&) noexcept = default;
MatFunEngine& MatFunEngine::operator=(MatFunEngine&&) noexcept = default;

const Eigen::SparseMatrix<double>& MatFunEngine::op() const { return impl_->A; }
const MatFunBackend& MatFunEngine::backend() const { return impl_->cfg; }

namespace {
void check_action_args(int n, double tau, const Eigen::VectorXd& v) {
    if (v.size() != n) throw DimensionError("matfun: vector length mismatch");
    if (tau < 0.0) throw ConfigError("matfun: negative time step");
    if (!v.allFinite()) throw NumericalError("matfun: non-finite input vector");
}
}  // namespace

Eigen::VectorXd MatFunEngine::expm(double tau, const Eigen::VectorXd& v) const {
    check_action_args(impl_->n, tau, v);
    if (tau == 0.0) return v;
    return impl_->advance(tau, &v, nullptr, nullptr);
}

Eigen::VectorXd MatFunEngine::phi1(double tau, const Eigen::VectorXd& v) const {
    check_action_args(impl_->n, tau, v);
    if (tau == 0.0) return v;  // phi1(0) = I
    return impl_->advance(tau, nullptr, &v, nullptr) / tau;
}

Eigen::VectorXd MatFunEngine::phi2(double tau, const Eigen::VectorXd& v) const {
    check_action_args(impl_->n, tau, v);
    if (tau == 0.0) return 0.5 * v;  // phi2(0) = 1/2
    return impl_->advance(tau, nullptr, nullptr, &v) / (tau * tau);
}

Eigen::VectorXd MatFunEngine::affine_advance(double tau, const Eigen::VectorXd& u0,
                                             const Eigen::VectorXd& b1,
                                             const Eigen::VectorXd& b2) const {
    check_action_args(impl_->n, tau, u0);
    if (tau == 0.0) return u0;
    const bool has1 = b1.size() > 0 && !b1.isZero(0.0);
    const bool has2 = b2.size() > 0 && !b2.isZero(0.0);
    if (has1 && b1.size() != impl_->n) throw DimensionError("matfun: b1 length mismatch");
    if (has2 && b2.size() != impl_->n) throw DimensionError("matfun: b2 length mismatch");
    return impl_->advance(tau, &u0, has1 ? &b1 : nullptr, has2 ? &b2 : nullptr);
}

Eigen::VectorXd expm_action(const MatFunBackend& b, const Eigen::SparseMatrix<double>& A,
                            double tau, const Eigen::VectorXd& v) {
    return MatFunEngine(b, A).expm(tau, v);
}

Eigen::VectorXd phi1_action(const MatFunBackend& b, const Eigen::SparseMatrix<double>& A,
                            double tau, const Eigen::VectorXd& v) {
    return MatFunEngine(b, A).phi1(tau, v);
}

Eigen::VectorXd phi2_action(const MatFunBackend& b, const Eigen::SparseMatrix<double>& A,
                            double tau, const Eigen::VectorXd& v) {
    return MatFunEngine(b, A).phi2(tau, v);
}

}  // namespace splitpde
