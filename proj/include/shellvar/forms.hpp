#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "shellvar/dual.hpp"
#include "shellvar/errors.hpp"
#include "shellvar/surface.hpp"
#include "shellvar/vec.hpp"

namespace shellvar {

/// First, second and third fundamental forms at one node.
/// b is symmetrized: the two mixed products agree analytically and differ
/// discretely by O(h^2).
template <class T>
struct NodeForms {
    SymMat2<T> a, b, c;
};

template <class T>
NodeForms<T> forms_at(const Mat32<T>& grad_psi, const Mat32<T>& grad_a3) {
    NodeForms<T> f;
    f.a = {dot(grad_psi.col[0], grad_psi.col[0]), dot(grad_psi.col[0], grad_psi.col[1]),
           dot(grad_psi.col[1], grad_psi.col[1])};
    f.b = {-dot(grad_psi.col[0], grad_a3.col[0]),
           -0.5 * (dot(grad_psi.col[0], grad_a3.col[1]) + dot(grad_psi.col[1], grad_a3.col[0])),
           -dot(grad_psi.col[1], grad_a3.col[1])};
    f.c = {dot(grad_a3.col[0], grad_a3.col[0]), dot(grad_a3.col[0], grad_a3.col[1]),
           dot(grad_a3.col[1], grad_a3.col[1])};
    return f;
}

template <class T>
struct NodeCurv {
    T H, K, kappa1, kappa2;  // kappa1 >= kappa2
};

/// H = tr(b a^-1)/2, K = det(b a^-1); principal curvatures H +- sqrt(H^2-K).
template <class T>
NodeCurv<T> curv_at(const NodeForms<T>& f) {
    using std::sqrt;
    T da = det(f.a);
    NodeCurv<T> c;
    c.H = 0.5 * (f.b.m11 * f.a.m22 - 2.0 * f.b.m12 * f.a.m12 + f.b.m22 * f.a.m11) / da;
    c.K = det(f.b) / da;
    T disc = c.H * c.H - c.K;
    // At umbilic points disc = 0 and sqrt has no one-sided derivative; both
    // principal curvatures collapse to H there.
    T s = value_of(disc) <= 0.0 ? T(0.0) : sqrt(disc);
    c.kappa1 = c.H + s;
    c.kappa2 = c.H - s;
    return c;
}

struct FundamentalForms {
    std::vector<SymMat2d> a, b, c, a_inv;
};

inline FundamentalForms fundamental_forms(const SurfaceConfiguration& cfg) {
    FundamentalForms out;
    const std::size_t n = cfg.grad_psi.size();
    out.a.resize(n);
    out.b.resize(n);
    out.c.resize(n);
    out.a_inv.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        NodeForms<double> f = forms_at(cfg.grad_psi[k], cfg.grad_a3[k]);
        if (det(f.a) <= 0.0)
            throw DegenerateMetricError("fundamental_forms: det(a_ab) <= 0 at node " + std::to_string(k));
        out.a[k] = f.a;
        out.b[k] = f.b;
        out.c[k] = f.c;
        out.a_inv[k] = inverse(f.a);
    }
    return out;
}

struct CurvatureData {
    std::vector<double> H, K, kappa1, kappa2;
};

inline CurvatureData curvatures(const FundamentalForms& forms) {
    CurvatureData out;
    const std::size_t n = forms.a.size();
    out.H.resize(n);
    out.K.resize(n);
    out.kappa1.resize(n);
    out.kappa2.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        NodeCurv<double> c = curv_at(NodeForms<double>{forms.a[k], forms.b[k], forms.c[k]});
        out.H[k] = c.H;
        out.K[k] = c.K;
        out.kappa1[k] = c.kappa1;
        out.kappa2[k] = c.kappa2;
    }
    return out;
}

/// det grad Phi at offset z: (1 - z k1)(1 - z k2) sqrt_a. The sign of the
/// result carries the orientation information.
inline double shell_jacobian(double kappa1, double kappa2, double sqrt_a, double z) {
    return (1.0 - z * kappa1) * (1.0 - z * kappa2) * sqrt_a;
}

/// Symmetric vector-product bracket [p1,p2] = (d1 p1 ^ d2 p2 + d1 p2 ^ d2 p1)/2.
/// Satisfies [psi,psi] = d1 psi ^ d2 psi, [psi,a3] = -H d1 psi ^ d2 psi and
/// [a3,a3] = K d1 psi ^ d2 psi.
inline Field3 bracket(const std::vector<Mat32d>& grad1, const std::vector<Mat32d>& grad2) {
    if (grad1.size() != grad2.size())
        throw ShapeError("bracket: mismatched field sizes");
    Field3 out(grad1.size());
    for (std::size_t k = 0; k < grad1.size(); ++k)
        out[k] = 0.5 * (cross(grad1[k].col[0], grad2[k].col[1]) + cross(grad2[k].col[0], grad1[k].col[1]));
    return out;
}

}  // namespace shellvar
