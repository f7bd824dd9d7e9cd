#pragma once

#include <array>
#include <functional>

#include "splitpde/grid.hpp"

namespace splitpde {

enum class BcKind { Dirichlet, Neumann, Robin };

/// One face of the boundary operator B u = alpha*u + beta*du/dn together
/// with its data b(s, t), where s is the coordinate along the face.
struct FaceCondition {
    BcKind kind = BcKind::Dirichlet;
    double alpha = 1.0;  // coefficient of u
    double beta = 0.0;   // coefficient of du/dn (outward normal)
    std::function<double(double s, double t)> data;

    static FaceCondition dirichlet(std::function<double(double, double)> b);
    static FaceCondition neumann(std::function<double(double, double)> b);
    static FaceCondition robin(double alpha, double beta,
                               std::function<double(double, double)> b);

    bool has_derivative() const { return kind != BcKind::Dirichlet; }
};

/// Boundary specification for all faces of (0,1)^dim.
/// Robin faces must satisfy beta != 0 (uniform non-tangentiality).
struct BoundarySpec {
    int dim = 1;
    std::array<FaceCondition, 4> face;

    static BoundarySpec line(FaceCondition left, FaceCondition right);
    static BoundarySpec square(FaceCondition left, FaceCondition right,
                               FaceCondition bottom, FaceCondition top);

    const FaceCondition& at(Face f) const { return face[static_cast<int>(f)]; }
    FaceCondition& at(Face f) { return face[static_cast<int>(f)]; }

    void validate() const;  // throws ConfigError on beta == 0 derivative faces

    /// Same kinds and coefficients, but all data identically zero.  Used for
    /// coarse-level operators and residual equations.
    BoundarySpec homogeneous() const;
};

}  // namespace splitpde
