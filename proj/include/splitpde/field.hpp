#pragma once

#include <Eigen/Dense>

#include "splitpde/grid.hpp"

namespace splitpde {

/// Grid function over the closed grid (interior plus boundary nodes).
struct StateField {
    Grid grid;
    Eigen::VectorXd v;  // length grid.closed_count(), flat index grid.cidx(i, j)

    StateField() = default;
    explicit StateField(const Grid& g) : grid(g), v(Eigen::VectorXd::Zero(g.closed_count())) {}

    double& at(int i, int j = 0) { return v[grid.cidx(i, j)]; }
    double at(int i, int j = 0) const { return v[grid.cidx(i, j)]; }

    Eigen::VectorXd interior() const;
    void set_interior(const Eigen::VectorXd& u);
    void add_interior_to(Eigen::VectorXd& out) const;  // out += interior values

    bool all_finite() const { return v.allFinite(); }
};

/// Samples fn(x, y) at every node of the closed grid.
StateField sample_field(const Grid& g, const std::function<double(double, double)>& fn);

}  // namespace splitpde
