#pragma once

#include <memory>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "splitpde/errors.hpp"

namespace splitpde {

enum class BackendKind { Dense, Krylov };

/// Backend selection and tolerances for the matrix-function actions.
struct MatFunBackend {
    BackendKind kind = BackendKind::Dense;
    int krylov_max_dim = 64;      // Arnoldi subspace cap per substep
    double krylov_tol = 1e-10;    // relative generalized-residual tolerance
    int dense_cap = 2000;         // dense backend refuses larger operators

    static MatFunBackend dense() { return {}; }
    static MatFunBackend krylov(double tol = 1e-10, int max_dim = 64) {
        MatFunBackend b;
        b.kind = BackendKind::Krylov;
        b.krylov_tol = tol;
        b.krylov_max_dim = max_dim;
        return b;
    }
};

/// Evaluates w = f(tau*A) v for f in {exp, phi1, phi2} and the affine
/// combination used by the inhomogeneous diffusion flow,
///     u(tau) = e^{tau A} u0 + tau*phi1(tau A) b1 + tau^2*phi2(tau A) b2,
/// where phi1(z) = (e^z - 1)/z and phi2(z) = (phi1(z) - 1)/z.
///
/// The engine binds a backend to one operator so per-operator work
/// (spectral decomposition for the dense path) happens once per run.
/// All evaluation methods are const and safe to call concurrently.
class MatFunEngine {
public:
    MatFunEngine(const MatFunBackend& backend, Eigen::SparseMatrix<double> A);
    ~MatFunEngine();
    MatFunEngine(MatFunEngine&&) noexcept;
    MatFunEngine& operator=(MatFunEngine&&) noexcept;

    Eigen::VectorXd expm(double tau, const Eigen::VectorXd& v) const;
    Eigen::VectorXd phi1(double tau, const Eigen::VectorXd& v) const;
    Eigen::VectorXd phi2(double tau, const Eigen::VectorXd& v) const;
    Eigen::VectorXd affine_advance(double tau, const Eigen::VectorXd& u0,
                                   const Eigen::VectorXd& b1,
                                   const Eigen::VectorXd& b2) const;

    const Eigen::SparseMatrix<double>& op() const;
    const MatFunBackend& backend() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Stable scalar phi functions (Taylor series near zero, expm1 away from it).
double phi1_scalar(double z);
double phi2_scalar(double z);

/// One-shot action helpers; construct a transient engine.  Prefer holding a
/// MatFunEngine when evaluating many actions against the same operator.
Eigen::VectorXd expm_action(const MatFunBackend& b, const Eigen::SparseMatrix<double>& A,
                            double tau, const Eigen::VectorXd& v);
Eigen::VectorXd phi1_action(const MatFunBackend& b, const Eigen::SparseMatrix<double>& A,
                            double tau, const Eigen::VectorXd& v);
Eigen::VectorXd phi2_action(const MatFunBackend& b, const Eigen::SparseMatrix<double>& A,
                            double tau, const Eigen::VectorXd& v);

}  // namespace splitpde
