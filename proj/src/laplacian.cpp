#include "splitpde/laplacian.hpp"

#include <cmath>

namespace splitpde {

namespace {

// Elimination constants for a derivative face: the one-sided condition
//   alpha*u_b + beta*(3 u_b - 4 u_1 + u_2)/(2h) = b
// solved for the boundary value gives  u_b = b/D + g*(4 u_1 - u_2)  with
//   D = alpha + 3 beta/(2h),   g = beta/(2 h D).
struct FaceClosure {
    double D;
    double g;
};

FaceClosure closure_of(const FaceCondition& fc, double h) {
    const double D = fc.alpha + 1.5 * fc.beta / h;
    if (std::abs(D) < 1e-14 * (std::abs(fc.alpha) + std::abs(fc.beta) / h))
        throw ConfigError("boundary: degenerate Robin closure (alpha + 3*beta/(2*dx) ~ 0)");
    return {D, fc.beta / (2.0 * h * D)};
}

// Inward neighbors of a boundary node along the normal of face f,
// in closed-grid coordinates.
void inward_nodes(const Grid& g, Face f, int i, int j, int& i1, int& j1, int& i2, int& j2) {
    i1 = i2 = i;
    j1 = j2 = j;
    switch (f) {
        case Face::Left: i1 = 1; i2 = 2; break;
        case Face::Right: i1 = g.nx(); i2 = g.nx() - 1; break;
        case Face::Bottom: j1 = 1; j2 = 2; break;
        case Face::Top: j1 = g.ny(); j2 = g.ny() - 1; break;
    }
}

double face_h(const Grid& g, Face f) {
    return (f == Face::Left || f == Face::Right) ? g.dx[0] : g.dx[1];
}

}  // namespace

double DiscreteDiffusion::node_data(const BoundaryNode& bn, double t) const {
    if (bn.corner && bn.face2 != bn.face)
        return 0.5 * (bc.at(bn.face).data(bn.s, t) + bc.at(bn.face2).data(bn.s2, t));
    return bc.at(bn.face).data(bn.s, t);
}

Eigen::VectorXd DiscreteDiffusion::forcing(double t) const {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n_total());
    for (const ForcingTerm& ft : forcing_terms)
        c[ft.row] += ft.coeff * node_data(bnodes_[ft.bnode], t);
    return c;
}

Eigen::VectorXd DiscreteDiffusion::forcing_from_node_data(const Eigen::VectorXd& bvals) const {
    if (bvals.size() != static_cast<Eigen::Index>(bnodes_.size()))
        throw DimensionError("forcing_from_node_data: boundary value count mismatch");
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n_total());
    for (const ForcingTerm& ft : forcing_terms)
        c[ft.row] += ft.coeff * bvals[ft.bnode];
    return c;
}

template <class DataFn>
void DiscreteDiffusion::reconstruct_impl(StateField& u, DataFn&& data) const {
    if (!u.grid.same_shape(grid)) throw DimensionError("reconstruct_boundary: grid mismatch");
    const Grid& g = grid;
    // Edge nodes first (they only read interior values), corners second
    // (their one-sided stencils read edge values).
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < bnodes_.size(); ++k) {
            const BoundaryNode& bn = bnodes_[k];
            if (bn.corner != (pass == 1)) continue;
            const double bval = data(k);
            if (!bn.corner || bn.face2 == bn.face) {
                const FaceCondition& fc = bc.at(bn.face);
                if (fc.kind == BcKind::Dirichlet) {
                    u.v[bn.ci] = bval / fc.alpha;
                } else {
                    int i1, j1, i2, j2;
                    inward_nodes(g, bn.face, bn.i, bn.j, i1, j1, i2, j2);
                    const double h = face_h(g, bn.face);
                    const FaceClosure cl = closure_of(fc, h);
                    u.v[bn.ci] = bval / cl.D +
                                 cl.g * (4.0 * u.v[g.cidx(i1, j1)] - u.v[g.cidx(i2, j2)]);
                }
            } else {
                // Two derivative faces meet: average the two reconstructions.
                double acc = 0.0;
                for (Face f : {bn.face, bn.face2}) {
                    int i1, j1, i2, j2;
                    inward_nodes(g, f, bn.i, bn.j, i1, j1, i2, j2);
                    const double h = face_h(g, f);
                    const FaceClosure cl = closure_of(bc.at(f), h);
                    acc += bval / cl.D +
                           cl.g * (4.0 * u.v[g.cidx(i1, j1)] - u.v[g.cidx(i2, j2)]);
                }
                u.v[bn.ci] = 0.5 * acc;
            }
        }
    }
}

void DiscreteDiffusion::reconstruct_boundary(StateField& u, double t) const {
    reconstruct_impl(u, [&](std::size_t k) { return node_data(bnodes_[k], t); });
}

void DiscreteDiffusion::reconstruct_boundary_from_data(StateField& u,
                                                       const Eigen::VectorXd& bvals) const {
    if (bvals.size() != static_cast<Eigen::Index>(bnodes_.size()))
        throw DimensionError("reconstruct_boundary_from_data: boundary value count mismatch");
    reconstruct_impl(u, [&](std::size_t k) { return bvals[k]; });
}

Eigen::VectorXd DiscreteDiffusion::boundary_operator(const StateField& u) const {
    if (!u.grid.same_shape(grid)) throw DimensionError("boundary_operator: grid mismatch");
    const Grid& g = grid;
    Eigen::VectorXd out(bnodes_.size());
    for (std::size_t k = 0; k < bnodes_.size(); ++k) {
        const BoundaryNode& bn = bnodes_[k];
        const double ub = u.v[bn.ci];
        double acc = 0.0;
        int nfaces = 0;
        for (Face f : {bn.face, bn.face2}) {
            if (nfaces == 1 && f == bn.face) break;  // face2 == face: single term
            const FaceCondition& fc = bc.at(f);
            double val = fc.alpha * ub;
            if (fc.has_derivative()) {
                int i1, j1, i2, j2;
                inward_nodes(g, f, bn.i, bn.j, i1, j1, i2, j2);
                const double h = face_h(g, f);
                val += fc.beta *
                       (3.0 * ub - 4.0 * u.v[g.cidx(i1, j1)] + u.v[g.cidx(i2, j2)]) / (2.0 * h);
            }
            acc += val;
            ++nfaces;
        }
        out[k] = acc / nfaces;
    }
    return out;
}

Eigen::VectorXd DiscreteDiffusion::boundary_data(double t) const {
    Eigen::VectorXd out(bnodes_.size());
    for (std::size_t k = 0; k < bnodes_.size(); ++k) out[k] = node_data(bnodes_[k], t);
    return out;
}

DiscreteDiffusion build_laplacian(const Grid& grid, const BoundarySpec& bc) {
    if (grid.dim != bc.dim) throw DimensionError("build_laplacian: grid/bc dimension mismatch");
    bc.validate();

    DiscreteDiffusion d;
    d.grid = grid;
    d.bc = bc;

    // Boundary node enumeration: edges face by face, then corners.
    std::vector<int> lookup(grid.closed_count(), -1);
    auto push = [&](int i, int j, Face f, Face f2, bool corner, double s, double s2) {
        BoundaryNode bn;
        bn.i = i;
        bn.j = j;
        bn.ci = grid.cidx(i, j);
        bn.face = f;
        bn.face2 = f2;
        bn.corner = corner;
        bn.s = s;
        bn.s2 = s2;
        lookup[bn.ci] = static_cast<int>(d.bnodes_.size());
        d.bnodes_.push_back(bn);
    };

    if (grid.dim == 1) {
        push(0, 0, Face::Left, Face::Left, false, 0.0, 0.0);
        push(grid.nx() + 1, 0, Face::Right, Face::Right, false, 0.0, 0.0);
    } else {
        for (int j = 1; j <= grid.ny(); ++j) push(0, j, Face::Left, Face::Left, false, grid.y(j), 0.0);
        for (int j = 1; j <= grid.ny(); ++j)
            push(grid.nx() + 1, j, Face::Right, Face::Right, false, grid.y(j), 0.0);
        for (int i = 1; i <= grid.nx(); ++i)
            push(i, 0, Face::Bottom, Face::Bottom, false, grid.x(i), 0.0);
        for (int i = 1; i <= grid.nx(); ++i)
            push(i, grid.ny() + 1, Face::Top, Face::Top, false, grid.x(i), 0.0);

        auto corner = [&](int i, int j, Face fx, Face fy) {
            const double sx = grid.y(j);  // coordinate along a vertical face is y
            const double sy = grid.x(i);
            const bool dx_dir = bc.at(fx).kind == BcKind::Dirichlet;
            const bool dy_dir = bc.at(fy).kind == BcKind::Dirichlet;
            if (dx_dir || !dy_dir)
                push(i, j, fx, dx_dir || dy_dir ? fx : fy, true, sx, sy);
            else
                push(i, j, fy, fy, true, sy, sy);
        };
        corner(0, 0, Face::Left, Face::Bottom);
        corner(grid.nx() + 1, 0, Face::Right, Face::Bottom);
        corner(0, grid.ny() + 1, Face::Left, Face::Top);
        corner(grid.nx() + 1, grid.ny() + 1, Face::Right, Face::Top);
    }

    const int n = grid.interior_count();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(n) * (grid.dim == 1 ? 3 : 5) + 8);

    auto couple = [&](int row, int i, int j, Face f, int ni, int nj, int i2, int j2, double h) {
        // Contribution of the axis neighbor (ni,nj) to the stencil at row.
        const double w = 1.0 / (h * h);
        if (grid.is_interior(ni, grid.dim == 2 ? nj : 1)) {
            trips.emplace_back(row, grid.iidx(ni, nj), w);
            return;
        }
        const int bn = lookup[grid.cidx(ni, grid.dim == 2 ? nj : 0)];
        const FaceCondition& fc = bc.at(f);
        if (fc.kind == BcKind::Dirichlet) {
            d.forcing_terms.push_back({row, bn, w / fc.alpha});
        } else {
            const FaceClosure cl = closure_of(fc, h);
            trips.emplace_back(row, grid.iidx(i, j), 4.0 * cl.g * w);
            trips.emplace_back(row, grid.iidx(i2, j2), -cl.g * w);
            d.forcing_terms.push_back({row, bn, w / cl.D});
        }
    };

    for (int j = 1; j <= grid.ny(); ++j) {
        for (int i = 1; i <= grid.nx(); ++i) {
            const int row = grid.iidx(i, j);
            const double hx = grid.dx[0];
            trips.emplace_back(row, row, -2.0 / (hx * hx));
            couple(row, i, j, Face::Left, i - 1, j, i + 1, j, hx);
            couple(row, i, j, Face::Right, i + 1, j, i - 1, j, hx);
            if (grid.dim == 2) {
                const double hy = grid.dx[1];
                trips.emplace_back(row, row, -2.0 / (hy * hy));
                couple(row, i, j, Face::Bottom, i, j - 1, i, j + 1, hy);
                couple(row, i, j, Face::Top, i, j + 1, i, j - 1, hy);
            }
        }
    }

    d.A.resize(n, n);
    d.A.setFromTriplets(trips.begin(), trips.end());
    d.A.makeCompressed();
    return d;
}

}  // namespace splitpde
