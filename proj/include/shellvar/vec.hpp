#pragma once

#include <cmath>

namespace shellvar {

template <class T>
struct Vec3 {
    T x{}, y{}, z{};

    Vec3() = default;
    Vec3(T x_, T y_, T z_) : x(x_), y(y_), z(z_) {}

    T& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    const T& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(const T& s) { x *= s; y *= s; z *= s; return *this; }
};

template <class T> Vec3<T> operator+(Vec3<T> a, const Vec3<T>& b) { return a += b; }
template <class T> Vec3<T> operator-(Vec3<T> a, const Vec3<T>& b) { return a -= b; }
template <class T> Vec3<T> operator-(const Vec3<T>& a) { return {-a.x, -a.y, -a.z}; }
template <class T, class S> auto operator*(const S& s, const Vec3<T>& v) -> Vec3<decltype(s * v.x)> {
    return {s * v.x, s * v.y, s * v.z};
}
template <class T, class S> auto operator*(const Vec3<T>& v, const S& s) -> Vec3<decltype(v.x * s)> {
    return {v.x * s, v.y * s, v.z * s};
}
template <class T, class S> auto operator/(const Vec3<T>& v, const S& s) -> Vec3<decltype(v.x / s)> {
    return {v.x / s, v.y / s, v.z / s};
}

template <class T> T dot(const Vec3<T>& a, const Vec3<T>& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

template <class T> Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

template <class T> T norm_sq(const Vec3<T>& a) { return dot(a, a); }

template <class T> T norm(const Vec3<T>& a) {
    using std::sqrt;
    return sqrt(norm_sq(a));
}

/// 3x2 matrix stored as two column vectors (the two partial derivatives).
template <class T>
struct Mat32 {
    Vec3<T> col[2];

    Vec3<T>& operator[](int a) { return col[a]; }
    const Vec3<T>& operator[](int a) const { return col[a]; }
};

template <class T> Mat32<T> operator+(const Mat32<T>& a, const Mat32<T>& b) {
    return {{a.col[0] + b.col[0], a.col[1] + b.col[1]}};
}
template <class T> Mat32<T> operator-(const Mat32<T>& a, const Mat32<T>& b) {
    return {{a.col[0] - b.col[0], a.col[1] - b.col[1]}};
}
template <class T, class S> auto operator*(const S& s, const Mat32<T>& m) -> Mat32<decltype(s * m.col[0].x)> {
    return {{s * m.col[0], s * m.col[1]}};
}

template <class T> T frobenius_sq(const Mat32<T>& m) { return norm_sq(m.col[0]) + norm_sq(m.col[1]); }

/// Symmetric 2x2 matrix.
template <class T>
struct SymMat2 {
    T m11{}, m12{}, m22{};
};

template <class T> SymMat2<T> operator+(const SymMat2<T>& a, const SymMat2<T>& b) {
    return {a.m11 + b.m11, a.m12 + b.m12, a.m22 + b.m22};
}
template <class T> SymMat2<T> operator-(const SymMat2<T>& a, const SymMat2<T>& b) {
    return {a.m11 - b.m11, a.m12 - b.m12, a.m22 - b.m22};
}
template <class T, class S> auto operator*(const S& s, const SymMat2<T>& m) -> SymMat2<decltype(s * m.m11)> {
    return {s * m.m11, s * m.m12, s * m.m22};
}

template <class T> T det(const SymMat2<T>& m) { return m.m11 * m.m22 - m.m12 * m.m12; }
template <class T> T trace(const SymMat2<T>& m) { return m.m11 + m.m22; }

template <class T> SymMat2<T> inverse(const SymMat2<T>& m) {
    T d = det(m);
    return {m.m22 / d, -m.m12 / d, m.m11 / d};
}

/// B^T A B congruence with B symmetric: returns B A B (all symmetric 2x2).
template <class T> SymMat2<T> congruence(const SymMat2<T>& b, const SymMat2<T>& a) {
    // rows of (B A): r1 = (b11,b12).A, r2 = (b12,b22).A
    T p11 = b.m11 * a.m11 + b.m12 * a.m12;
    T p12 = b.m11 * a.m12 + b.m12 * a.m22;
    T p21 = b.m12 * a.m11 + b.m22 * a.m12;
    T p22 = b.m12 * a.m12 + b.m22 * a.m22;
    return {p11 * b.m11 + p12 * b.m12,
            p11 * b.m12 + p12 * b.m22,
            p21 * b.m12 + p22 * b.m22};
}

/// Symmetric 3x3, used for the G matrices exposed at API level.
template <class T>
struct SymMat3 {
    T m11{}, m12{}, m13{}, m22{}, m23{}, m33{};
};

template <class T> SymMat3<T> operator+(const SymMat3<T>& a, const SymMat3<T>& b) {
    return {a.m11 + b.m11, a.m12 + b.m12, a.m13 + b.m13, a.m22 + b.m22, a.m23 + b.m23, a.m33 + b.m33};
}

template <class T> T trace(const SymMat3<T>& m) { return m.m11 + m.m22 + m.m33; }

/// a (u ⊗ v + v ⊗ u)/2-free rank-one accumulation helper: s * (u ⊗ v), symmetrized.
template <class T>
SymMat3<T> sym_outer(const T& s, const Vec3<T>& u, const Vec3<T>& v) {
    return {s * u.x * v.x,
            s * (u.x * v.y + u.y * v.x) * 0.5,
            s * (u.x * v.z + u.z * v.x) * 0.5,
            s * u.y * v.y,
            s * (u.y * v.z + u.z * v.y) * 0.5,
            s * u.z * v.z};
}

using Vec3d = Vec3<double>;
using Mat32d = Mat32<double>;
using SymMat2d = SymMat2<double>;
using SymMat3d = SymMat3<double>;

}  // namespace shellvar
