#pragma once

#include <cstdint>
#include <vector>

#include "shellvar/errors.hpp"
#include "shellvar/vec.hpp"

namespace shellvar {

struct Rect {
    double x0 = 0.0, y0 = 0.0;
    double len1 = 1.0, len2 = 1.0;
};

/// Structured tensor-product discretization of the parameter rectangle.
///
/// Non-periodic directions place nodes at both ends (h = L/(n-1)); periodic
/// directions cover [0, L) with h = L/n and no boundary layer.
struct ParamGrid {
    int nx = 0, ny = 0;
    double h1 = 0.0, h2 = 0.0;
    double x0 = 0.0, y0 = 0.0;
    bool periodic1 = false, periodic2 = false;
    std::vector<std::uint8_t> boundary_mask;  // size nx*ny, 1 on gamma nodes

    int size() const { return nx * ny; }
    int index(int i, int j) const { return i * ny + j; }
    double x1(int i) const { return x0 + h1 * i; }
    double x2(int j) const { return y0 + h2 * j; }
    bool on_boundary(int i, int j) const { return boundary_mask[index(i, j)] != 0; }

    /// Trapezoidal weight in direction 1 (uniform h when periodic).
    double weight1(int i) const {
        if (periodic1) return h1;
        return (i == 0 || i == nx - 1) ? 0.5 * h1 : h1;
    }
    double weight2(int j) const {
        if (periodic2) return h2;
        return (j == 0 || j == ny - 1) ? 0.5 * h2 : h2;
    }
    double weight(int i, int j) const { return weight1(i) * weight2(j); }

    double area() const {
        double l1 = periodic1 ? h1 * nx : h1 * (nx - 1);
        double l2 = periodic2 ? h2 * ny : h2 * (ny - 1);
        return l1 * l2;
    }
};

inline ParamGrid build_grid(const Rect& rect, int nx, int ny, bool periodic1, bool periodic2) {
    if (nx < 3 || ny < 3)
        throw InvalidGridError("build_grid: node counts must be >= 3, got " + std::to_string(nx) +
                               "x" + std::to_string(ny));
    if (!(rect.len1 > 0.0) || !(rect.len2 > 0.0))
        throw InvalidGridError("build_grid: degenerate rectangle (side lengths must be positive)");
    ParamGrid g;
    g.nx = nx;
    g.ny = ny;
    g.x0 = rect.x0;
    g.y0 = rect.y0;
    g.periodic1 = periodic1;
    g.periodic2 = periodic2;
    g.h1 = periodic1 ? rect.len1 / nx : rect.len1 / (nx - 1);
    g.h2 = periodic2 ? rect.len2 / ny : rect.len2 / (ny - 1);
    g.boundary_mask.assign(static_cast<std::size_t>(nx) * ny, 0);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            bool b1 = !periodic1 && (i == 0 || i == nx - 1);
            bool b2 = !periodic2 && (j == 0 || j == ny - 1);
            if (b1 || b2) g.boundary_mask[g.index(i, j)] = 1;
        }
    return g;
}

/// One row of a second-order first-derivative operator: up to three
/// (index, coefficient) pairs along one direction.
struct Stencil {
    int npts = 0;
    int idx[3] = {0, 0, 0};
    double coef[3] = {0.0, 0.0, 0.0};
};

inline Stencil deriv_stencil(int n, double h, bool periodic, int i) {
    Stencil s;
    const double inv2h = 1.0 / (2.0 * h);
    if (periodic) {
        s.npts = 2;
        s.idx[0] = (i + 1) % n;
        s.coef[0] = inv2h;
        s.idx[1] = (i + n - 1) % n;
        s.coef[1] = -inv2h;
    } else if (i == 0) {
        s.npts = 3;
        s.idx[0] = 0; s.coef[0] = -3.0 * inv2h;
        s.idx[1] = 1; s.coef[1] = 4.0 * inv2h;
        s.idx[2] = 2; s.coef[2] = -inv2h;
    } else if (i == n - 1) {
        s.npts = 3;
        s.idx[0] = n - 1; s.coef[0] = 3.0 * inv2h;
        s.idx[1] = n - 2; s.coef[1] = -4.0 * inv2h;
        s.idx[2] = n - 3; s.coef[2] = inv2h;
    } else {
        s.npts = 2;
        s.idx[0] = i + 1; s.coef[0] = inv2h;
        s.idx[1] = i - 1; s.coef[1] = -inv2h;
    }
    return s;
}

/// Indices j whose density can depend on a nodal value at i through two
/// successive stencil applications (the dependency radius of the energy chain).
inline std::vector<int> two_step_influence(int n, bool periodic, int i) {
    auto one_step = [&](int k) {
        // rows j with k in deriv_stencil(j)
        std::vector<int> out;
        if (periodic) {
            out.push_back((k + 1) % n);
            out.push_back((k + n - 1) % n);
        } else {
            if (k >= 1) out.push_back(k - 1);
            if (k <= n - 2) out.push_back(k + 1);
            if (k <= 2) out.push_back(0);            // left one-sided row
            if (k >= n - 3) out.push_back(n - 1);    // right one-sided row
        }
        return out;
    };
    std::vector<std::uint8_t> mark(n, 0);
    mark[i] = 1;
    for (int j : one_step(i)) {
        mark[j] = 1;
        for (int k : one_step(j)) mark[k] = 1;
    }
    std::vector<int> out;
    for (int j = 0; j < n; ++j)
        if (mark[j]) out.push_back(j);
    return out;
}

using Field3 = std::vector<Vec3d>;

/// Gradient of a nodal 3-vector functor at one node, via the grid stencils.
/// F must be callable as f(i, j) -> Vec3<T>.
template <class T, class F>
Mat32<T> grad_at(const ParamGrid& g, F&& f, int i, int j) {
    Mat32<T> out;
    Stencil s1 = deriv_stencil(g.nx, g.h1, g.periodic1, i);
    for (int k = 0; k < s1.npts; ++k) out.col[0] += s1.coef[k] * f(s1.idx[k], j);
    Stencil s2 = deriv_stencil(g.ny, g.h2, g.periodic2, j);
    for (int k = 0; k < s2.npts; ++k) out.col[1] += s2.coef[k] * f(i, s2.idx[k]);
    return out;
}

/// Per-node 3x2 gradients of a nodal field (central interior, one-sided at
/// non-periodic boundaries, both second order).
inline std::vector<Mat32d> differentiate(const Field3& field, const ParamGrid& g) {
    if (static_cast<int>(field.size()) != g.size())
        throw ShapeError("differentiate: field size " + std::to_string(field.size()) +
                         " does not match grid " + std::to_string(g.size()));
    std::vector<Mat32d> out(field.size());
    auto at = [&](int i, int j) { return field[g.index(i, j)]; };
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) out[g.index(i, j)] = grad_at<double>(g, at, i, j);
    return out;
}

}  // namespace shellvar
