#pragma once

#include <array>
#include <cassert>

#include "splitpde/errors.hpp"

namespace splitpde {

/// Faces of the unit interval/square, indexed by the axis they bound.
enum class Face : int { Left = 0, Right = 1, Bottom = 2, Top = 3 };

inline constexpr int face_count(int dim) { return dim == 1 ? 2 : 4; }
const char* face_name(Face f);

/// Uniform vertex grid on (0,1)^dim.  Interior nodes are strictly inside,
/// boundary nodes sit on the faces; dx * (n + 1) == 1 per axis.
struct Grid {
    int dim = 1;
    std::array<int, 2> n = {0, 0};       // interior nodes per axis (n[1] == 1 placeholder in 1D)
    std::array<double, 2> dx = {0, 0};

    static Grid line(int nx);
    static Grid square(int nx, int ny);

    int nx() const { return n[0]; }
    int ny() const { return dim == 2 ? n[1] : 1; }

    int interior_count() const { return dim == 1 ? n[0] : n[0] * n[1]; }
    int closed_nx() const { return n[0] + 2; }
    int closed_ny() const { return dim == 2 ? n[1] + 2 : 1; }
    int closed_count() const { return closed_nx() * closed_ny(); }

    // Flat index into the closed grid; i in [0, nx+1], j in [0, ny+1].
    int cidx(int i, int j = 0) const { return i + j * closed_nx(); }
    // Flat index into the interior; i in [1, nx], j in [1, ny].
    int iidx(int i, int j = 1) const { return (i - 1) + (dim == 2 ? (j - 1) * n[0] : 0); }

    double x(int i) const { return i * dx[0]; }
    double y(int j) const { return dim == 2 ? j * dx[1] : 0.0; }

    bool is_interior(int i, int j = 1) const {
        return i >= 1 && i <= n[0] && (dim == 1 || (j >= 1 && j <= n[1]));
    }

    bool same_shape(const Grid& o) const {
        return dim == o.dim && n == o.n;
    }
};

}  // namespace splitpde
