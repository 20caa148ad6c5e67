#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "shellvar/errors.hpp"
#include "shellvar/grid.hpp"
#include "shellvar/vec.hpp"

namespace shellvar {

inline constexpr double kDegenerateEps = 1e-14;

/// a3 and area element at one node, from the 3x2 gradient. Templated so the
/// dual-number chain can flow through.
template <class T>
struct Frame {
    Vec3<T> a3;
    T sqrt_a;
};

template <class T>
Frame<T> frame_at(const Mat32<T>& grad_psi) {
    Vec3<T> c = cross(grad_psi.col[0], grad_psi.col[1]);
    T n = norm(c);
    return {c / n, n};
}

/// Nodewise a3 = (d1 psi ^ d2 psi)/|.| and sqrt_a = |d1 psi ^ d2 psi|.
/// Throws DegenerateSurfaceError listing every node where |.| <= eps.
inline std::pair<Field3, std::vector<double>> frame(const std::vector<Mat32d>& grad_psi,
                                                    double eps_degenerate = kDegenerateEps) {
    Field3 a3(grad_psi.size());
    std::vector<double> sqrt_a(grad_psi.size());
    std::vector<int> bad;
    for (std::size_t k = 0; k < grad_psi.size(); ++k) {
        Vec3d c = cross(grad_psi[k].col[0], grad_psi[k].col[1]);
        double n = norm(c);
        if (n <= eps_degenerate) {
            bad.push_back(static_cast<int>(k));
            sqrt_a[k] = n;
            continue;
        }
        a3[k] = c / n;
        sqrt_a[k] = n;
    }
    if (!bad.empty()) {
        std::string msg = "frame: |d1 psi ^ d2 psi| <= " + std::to_string(eps_degenerate) + " at " +
                          std::to_string(bad.size()) + " node(s), first index " +
                          std::to_string(bad.front());
        throw DegenerateSurfaceError(msg, std::move(bad));
    }
    return {std::move(a3), std::move(sqrt_a)};
}

/// The unknown field psi with its derived tangent, normal and area data.
struct SurfaceConfiguration {
    Field3 psi;
    std::vector<Mat32d> grad_psi;
    Field3 a3;
    std::vector<Mat32d> grad_a3;
    std::vector<double> sqrt_a;
};

/// Builds the full derived chain: stencil gradients of psi, the frame, then
/// the same stencils applied to the a3 field.
inline SurfaceConfiguration make_surface(Field3 psi, const ParamGrid& g,
                                         double eps_degenerate = kDegenerateEps) {
    SurfaceConfiguration s;
    s.grad_psi = differentiate(psi, g);
    auto [a3, sqrt_a] = frame(s.grad_psi, eps_degenerate);
    s.grad_a3 = differentiate(a3, g);
    s.psi = std::move(psi);
    s.a3 = std::move(a3);
    s.sqrt_a = std::move(sqrt_a);
    return s;
}

/// Analytic test surface: position map plus closed-form curvature oracle.
/// Curvature signs follow b_ab = -d_a psi . d_b a3 with a3 from the
/// parametrization; the outward-normal sphere has H = -1/R.
struct SurfacePreset {
    std::string name;
    Rect rect;
    bool periodic1 = false, periodic2 = false;
    std::function<Vec3d(double, double)> position;
    bool has_oracle = false;
    std::function<double(double, double)> mean_curv;
    std::function<double(double, double)> gauss_curv;
};

inline SurfacePreset plate_preset(Rect rect = {}) {
    SurfacePreset p;
    p.name = "plate";
    p.rect = rect;
    p.position = [](double x1, double x2) { return Vec3d{x1, x2, 0.0}; };
    p.has_oracle = true;
    p.mean_curv = [](double, double) { return 0.0; };
    p.gauss_curv = [](double, double) { return 0.0; };
    return p;
}

/// psi = (R cos x1, R sin x1, x2); periodic in x1 over the full circle.
inline SurfacePreset cylinder_preset(double radius, double z0 = 0.0, double z1 = 1.0) {
    SurfacePreset p;
    p.name = "cylinder";
    p.rect = {0.0, z0, 2.0 * M_PI, z1 - z0};
    p.periodic1 = true;
    p.position = [radius](double x1, double x2) {
        return Vec3d{radius * std::cos(x1), radius * std::sin(x1), x2};
    };
    p.has_oracle = true;
    p.mean_curv = [radius](double, double) { return -0.5 / radius; };
    p.gauss_curv = [](double, double) { return 0.0; };
    return p;
}

/// Lat-long cap between colatitudes, excluding the poles; periodic in azimuth.
inline SurfacePreset sphere_cap_preset(double radius, double theta0, double theta1) {
    if (!(theta0 > 0.0 && theta1 < M_PI && theta1 > theta0))
        throw ValidationError("sphere_cap: colatitude range must satisfy 0 < theta0 < theta1 < pi "
                              "(poles are excluded)");
    SurfacePreset p;
    p.name = "sphere_cap";
    p.rect = {theta0, 0.0, theta1 - theta0, 2.0 * M_PI};
    p.periodic2 = true;
    p.position = [radius](double th, double ph) {
        return Vec3d{radius * std::sin(th) * std::cos(ph), radius * std::sin(th) * std::sin(ph),
                     radius * std::cos(th)};
    };
    p.has_oracle = true;
    p.mean_curv = [radius](double, double) { return -1.0 / radius; };
    p.gauss_curv = [radius](double, double) { return 1.0 / (radius * radius); };
    return p;
}

/// Ring radius R, tube radius r, doubly periodic.
inline SurfacePreset torus_preset(double big_r, double small_r) {
    SurfacePreset p;
    p.name = "torus";
    p.rect = {0.0, 0.0, 2.0 * M_PI, 2.0 * M_PI};
    p.periodic1 = p.periodic2 = true;
    p.position = [big_r, small_r](double u, double v) {
        double a = big_r + small_r * std::cos(v);
        return Vec3d{a * std::cos(u), a * std::sin(u), small_r * std::sin(v)};
    };
    p.has_oracle = true;
    p.mean_curv = [big_r, small_r](double, double v) {
        double a = big_r + small_r * std::cos(v);
        return -0.5 * (std::cos(v) / a + 1.0 / small_r);
    };
    p.gauss_curv = [big_r, small_r](double, double v) {
        double a = big_r + small_r * std::cos(v);
        return std::cos(v) / (small_r * a);
    };
    return p;
}

inline ParamGrid grid_for(const SurfacePreset& p, int nx, int ny) {
    return build_grid(p.rect, nx, ny, p.periodic1, p.periodic2);
}

inline Field3 sample(const SurfacePreset& p, const ParamGrid& g) {
    Field3 f(g.size());
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) f[g.index(i, j)] = p.position(g.x1(i), g.x2(j));
    return f;
}

}  // namespace shellvar
