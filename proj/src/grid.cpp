#include "splitpde/grid.hpp"

#include "splitpde/boundary.hpp"
#include "splitpde/field.hpp"

namespace splitpde {

const char* face_name(Face f) {
    switch (f) {
        case Face::Left: return "left";
        case Face::Right: return "right";
        case Face::Bottom: return "bottom";
        case Face::Top: return "top";
    }
    return "?";
}

Grid Grid::line(int nx) {
    if (nx < 2) throw ConfigError("grid: need at least 2 interior nodes per axis");
    Grid g;
    g.dim = 1;
    g.n = {nx, 1};
    g.dx = {1.0 / (nx + 1), 0.0};
    return g;
}

Grid Grid::square(int nx, int ny) {
    if (nx < 2 || ny < 2) throw ConfigError("grid: need at least 2 interior nodes per axis");
    Grid g;
    g.dim = 2;
    g.n = {nx, ny};
    g.dx = {1.0 / (nx + 1), 1.0 / (ny + 1)};
    return g;
}

FaceCondition FaceCondition::dirichlet(std::function<double(double, double)> b) {
    FaceCondition f;
    f.kind = BcKind::Dirichlet;
    f.alpha = 1.0;
    f.beta = 0.0;
    f.data = std::move(b);
    return f;
}

FaceCondition FaceCondition::neumann(std::function<double(double, double)> b) {
    FaceCondition f;
    f.kind = BcKind::Neumann;
    f.alpha = 0.0;
    f.beta = 1.0;
    f.data = std::move(b);
    return f;
}

FaceCondition FaceCondition::robin(double alpha, double beta,
                                   std::function<double(double, double)> b) {
    FaceCondition f;
    f.kind = BcKind::Robin;
    f.alpha = alpha;
    f.beta = beta;
    f.data = std::move(b);
    return f;
}

BoundarySpec BoundarySpec::line(FaceCondition left, FaceCondition right) {
    BoundarySpec s;
    s.dim = 1;
    s.face[0] = std::move(left);
    s.face[1] = std::move(right);
    s.validate();
    return s;
}

BoundarySpec BoundarySpec::square(FaceCondition left, FaceCondition right,
                                  FaceCondition bottom, FaceCondition top) {
    BoundarySpec s;
    s.dim = 2;
    s.face[0] = std::move(left);
    s.face[1] = std::move(right);
    s.face[2] = std::move(bottom);
    s.face[3] = std::move(top);
    s.validate();
    return s;
}

void BoundarySpec::validate() const {
    for (int k = 0; k < face_count(dim); ++k) {
        const FaceCondition& f = face[k];
        if (f.has_derivative() && f.beta == 0.0)
            throw ConfigError(std::string("boundary: beta = 0 on derivative face ") +
                              face_name(static_cast<Face>(k)));
        if (!f.data) throw ConfigError("boundary: missing data function");
    }
}

BoundarySpec BoundarySpec::homogeneous() const {
    BoundarySpec s = *this;
    for (int k = 0; k < face_count(dim); ++k)
        s.face[k].data = [](double, double) { return 0.0; };
    return s;
}

Eigen::VectorXd StateField::interior() const {
    Eigen::VectorXd u(grid.interior_count());
    for (int j = 1; j <= grid.ny(); ++j)
        for (int i = 1; i <= grid.nx(); ++i)
            u[grid.iidx(i, j)] = v[grid.cidx(i, grid.dim == 2 ? j : 0)];
    return u;
}

void StateField::set_interior(const Eigen::VectorXd& u) {
    if (u.size() != grid.interior_count())
        throw DimensionError("StateField::set_interior: size mismatch");
    for (int j = 1; j <= grid.ny(); ++j)
        for (int i = 1; i <= grid.nx(); ++i)
            v[grid.cidx(i, grid.dim == 2 ? j : 0)] = u[grid.iidx(i, j)];
}

void StateField::add_interior_to(Eigen::VectorXd& out) const {
    if (out.size() != grid.interior_count())
        throw DimensionError("StateField::add_interior_to: size mismatch");
    for (int j = 1; j <= grid.ny(); ++j)
        for (int i = 1; i <= grid.nx(); ++i)
            out[grid.iidx(i, j)] += v[grid.cidx(i, grid.dim == 2 ? j : 0)];
}

StateField sample_field(const Grid& g, const std::function<double(double, double)>& fn) {
    StateField u(g);
    for (int j = 0; j < g.closed_ny(); ++j)
        for (int i = 0; i < g.closed_nx(); ++i)
            u.v[g.cidx(i, j)] = fn(g.x(i), g.y(j));
    return u;
}

}  // namespace splitpde
