#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "splitpde/boundary.hpp"
#include "splitpde/field.hpp"

namespace splitpde {

/// One node on the boundary of the closed grid.  Corners carry two faces;
/// `face` is the owning one (Dirichlet wins over derivative conditions,
/// lower enum value breaks remaining ties).
struct BoundaryNode {
    int i = 0, j = 0;      // closed-grid coordinates
    int ci = 0;            // flat closed index
    Face face = Face::Left;
    Face face2 = Face::Left;  // == face except at two-derivative-face corners
    bool corner = false;
    double s = 0.0;        // coordinate along `face`
    double s2 = 0.0;       // coordinate along `face2`
};

/// Finite-difference Laplacian on the interior nodes with the boundary
/// conditions eliminated: the method-of-lines system is
///     u' = A u + c(t) + f(u)         (interior nodes only).
/// Dirichlet node values move into c(t); Neumann/Robin boundary values are
/// eliminated with the second-order one-sided stencil
///     du/dn ~ (3 u_b - 4 u_1 + u_2) / (2 dx)
/// which is also the discrete boundary operator used for traces and for
/// reconstructing boundary node values of a field.
class DiscreteDiffusion {
public:
    Grid grid;
    BoundarySpec bc;
    Eigen::SparseMatrix<double> A;

    int n_total() const { return grid.interior_count(); }

    /// Affine boundary forcing c(t); linear in the boundary data values.
    Eigen::VectorXd forcing(double t) const;

    /// Forcing built from explicit per-boundary-node data values instead of
    /// evaluating bc.data (used by the corrector, whose "data" is a trace).
    Eigen::VectorXd forcing_from_node_data(const Eigen::VectorXd& bvals) const;

    /// Fills the boundary entries of u from its interior values and b(t).
    void reconstruct_boundary(StateField& u, double t) const;
    void reconstruct_boundary_from_data(StateField& u, const Eigen::VectorXd& bvals) const;

    /// Discrete boundary operator B_h applied to a full field, one value per
    /// boundary node (averaged one-sided operators at two-derivative corners).
    Eigen::VectorXd boundary_operator(const StateField& u) const;

    /// b(t) sampled at the boundary nodes (corner rule as above).
    Eigen::VectorXd boundary_data(double t) const;

    const std::vector<BoundaryNode>& boundary_nodes() const { return bnodes_; }

    // assembled by build_laplacian
    struct ForcingTerm {
        int row;       // interior flat index
        int bnode;     // index into boundary_nodes()
        double coeff;  // contribution coeff * data(bnode)
    };
    std::vector<ForcingTerm> forcing_terms;
    std::vector<BoundaryNode> bnodes_;

private:
    double node_data(const BoundaryNode& bn, double t) const;
    template <class DataFn>
    void reconstruct_impl(StateField& u, DataFn&& data) const;
};

/// Assembles the second-order Laplacian on grid with the given boundary
/// conditions.  Requires n_interior >= 2 per axis and matching dimensions.
DiscreteDiffusion build_laplacian(const Grid& grid, const BoundarySpec& bc);

}  // namespace splitpde
