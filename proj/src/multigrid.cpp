#include "splitpde/multigrid.hpp"

#include <Eigen/SparseLU>

namespace splitpde {

namespace {

struct Level {
    DiscreteDiffusion op;
    Eigen::VectorXd dinv;  // inverse diagonal of A
};

bool can_coarsen(const Grid& g) {
    const int Nx = g.nx() + 1;
    if (Nx % 2 != 0 || Nx / 2 - 1 < 2) return false;
    if (g.dim == 2) {
        const int Ny = g.ny() + 1;
        if (Ny % 2 != 0 || Ny / 2 - 1 < 2) return false;
    }
    return true;
}

Grid coarsen(const Grid& g) {
    const int nx = (g.nx() + 1) / 2 - 1;
    return g.dim == 1 ? Grid::line(nx) : Grid::square(nx, (g.ny() + 1) / 2 - 1);
}

}  // namespace

struct PoissonMultigrid::Impl {
    SmootherConfig cfg;
    std::vector<Level> levels;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> coarse_lu;

    void smooth(int l, Eigen::VectorXd& x, const Eigen::VectorXd& rhs, int sweeps) const {
        const Level& lv = levels[l];
        for (int s = 0; s < sweeps; ++s)
            x += cfg.damping * lv.dinv.cwiseProduct(rhs - lv.op.A * x);
    }

    // Full-weighting restriction of an interior residual to the next level.
    Eigen::VectorXd restrict_to(int lc, const Eigen::VectorXd& r) const {
        const Grid& gf = levels[lc - 1].op.grid;
        const Grid& gc = levels[lc].op.grid;
        Eigen::VectorXd out(gc.interior_count());
        if (gf.dim == 1) {
            for (int i = 1; i <= gc.nx(); ++i)
                out[gc.iidx(i)] =
                    0.25 * (r[gf.iidx(2 * i - 1)] + 2.0 * r[gf.iidx(2 * i)] + r[gf.iidx(2 * i + 1)]);
        } else {
            const double w1[3] = {0.25, 0.5, 0.25};
            for (int j = 1; j <= gc.ny(); ++j)
                for (int i = 1; i <= gc.nx(); ++i) {
                    double acc = 0.0;
                    for (int dj = -1; dj <= 1; ++dj)
                        for (int di = -1; di <= 1; ++di)
                            acc += w1[di + 1] * w1[dj + 1] * r[gf.iidx(2 * i + di, 2 * j + dj)];
                    out[gc.iidx(i, j)] = acc;
                }
        }
        return out;
    }

    // Linear interpolation of a coarse error to the fine interior.  The
    // coarse error is expanded to the closed grid first, with homogeneous
    // boundary closure, so face-adjacent fine nodes see consistent values.
    Eigen::VectorXd prolong_from(int lc, const Eigen::VectorXd& ec) const {
        const Grid& gf = levels[lc - 1].op.grid;
        const DiscreteDiffusion& dc = levels[lc].op;
        StateField e(dc.grid);
        e.set_interior(ec);
        dc.reconstruct_boundary(e, 0.0);  // homogeneous data
        Eigen::VectorXd out(gf.interior_count());
        auto sample1d = [&](const auto& value, int i) {
            return (i % 2 == 0) ? value(i / 2) : 0.5 * (value((i - 1) / 2) + value((i + 1) / 2));
        };
        if (gf.dim == 1) {
            auto val = [&](int ic) { return e.v[dc.grid.cidx(ic)]; };
            for (int i = 1; i <= gf.nx(); ++i) out[gf.iidx(i)] = sample1d(val, i);
        } else {
            for (int j = 1; j <= gf.ny(); ++j) {
                auto row = [&](int ic) {
                    auto col = [&](int jc) { return e.v[dc.grid.cidx(ic, jc)]; };
                    return sample1d(col, j);
                };
                for (int i = 1; i <= gf.nx(); ++i) out[gf.iidx(i, j)] = sample1d(row, i);
            }
        }
        return out;
    }

    void v_cycle(int l, Eigen::VectorXd& x, const Eigen::VectorXd& rhs) const {
        if (l == static_cast<int>(levels.size()) - 1) {
            x = coarse_lu.solve(rhs);
            return;
        }
        smooth(l, x, rhs, cfg.pre_sweeps);
        const Eigen::VectorXd r = rhs - levels[l].op.A * x;
        Eigen::VectorXd ec = Eigen::VectorXd::Zero(levels[l + 1].op.grid.interior_count());
        v_cycle(l + 1, ec, restrict_to(l + 1, r));
        x += prolong_from(l + 1, ec);
        smooth(l, x, rhs, cfg.post_sweeps);
    }
};

PoissonMultigrid::PoissonMultigrid(const Grid& grid, const BoundarySpec& bc, SmootherConfig cfg)
    : impl_(std::make_unique<Impl>()) {
    impl_->cfg = cfg;
    const BoundarySpec hom = bc.homogeneous();
    Grid g = grid;
    for (;;) {
        Level lv;
        lv.op = build_laplacian(g, hom);
        lv.dinv = lv.op.A.diagonal().cwiseInverse();
        impl_->levels.push_back(std::move(lv));
        if (!can_coarsen(g)) break;
        g = coarsen(g);
    }
    impl_->coarse_lu.compute(impl_->levels.back().op.A);
    if (impl_->coarse_lu.info() != Eigen::Success)
        throw NumericalError("multigrid: coarse factorization failed");
}

PoissonMultigrid::~PoissonMultigrid() = default;
PoissonMultigrid::PoissonMultigrid(PoissonMultigrid&&) noexcept = default;

int PoissonMultigrid::levels() const { return static_cast<int>(impl_->levels.size()); }
const SmootherConfig& PoissonMultigrid::config() const { return impl_->cfg; }

Eigen::VectorXd PoissonMultigrid::solve(const Eigen::VectorXd& rhs,
                                        std::vector<double>* residual_history) const {
    const Level& fine = impl_->levels.front();
    if (rhs.size() != fine.op.A.rows()) throw DimensionError("multigrid: rhs length mismatch");
    const SmootherConfig& cfg = impl_->cfg;
    const double scale = rhs.cwiseAbs().maxCoeff() + 1e-300;

    Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
    const int cap = cfg.tol > 0.0 ? cfg.max_cycles : cfg.v_cycles;
    double rel = 1.0;
    for (int cycle = 0; cycle < cap; ++cycle) {
        impl_->v_cycle(0, x, rhs);
        rel = (rhs - fine.op.A * x).cwiseAbs().maxCoeff() / scale;
        if (residual_history) residual_history->push_back(rel);
        if (cfg.tol > 0.0 && rel <= cfg.tol) return x;
    }
    if (cfg.tol > 0.0)
        throw MultigridError("multigrid: tolerance not reached within cycle cap", rel);
    return x;
}

}  // namespace splitpde
