#pragma once

#include <array>
#include <cmath>

namespace shellvar {

/// Forward-mode dual number with N derivative lanes.
///
/// The whole discrete energy chain (stencils -> frame -> forms -> density ->
/// quadrature) is templated on the scalar type, so evaluating it on Dual<3>
/// seeded at one node yields the exact derivative of the discrete functional
/// with respect to that node's three components.
template <int N>
struct Dual {
    double v{};
    std::array<double, N> d{};

    Dual() = default;
    Dual(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
    Dual(double value, const std::array<double, N>& deriv) : v(value), d(deriv) {}

    Dual& operator+=(const Dual& o) {
        v += o.v;
        for (int k = 0; k < N; ++k) d[k] += o.d[k];
        return *this;
    }
    Dual& operator-=(const Dual& o) {
        v -= o.v;
        for (int k = 0; k < N; ++k) d[k] -= o.d[k];
        return *this;
    }
    Dual& operator*=(const Dual& o) {
        for (int k = 0; k < N; ++k) d[k] = d[k] * o.v + v * o.d[k];
        v *= o.v;
        return *this;
    }
    Dual& operator/=(const Dual& o) {
        const double inv = 1.0 / o.v;
        for (int k = 0; k < N; ++k) d[k] = (d[k] - v * inv * o.d[k]) * inv;
        v *= inv;
        return *this;
    }
};

template <int N> Dual<N> operator+(Dual<N> a, const Dual<N>& b) { return a += b; }
template <int N> Dual<N> operator-(Dual<N> a, const Dual<N>& b) { return a -= b; }
template <int N> Dual<N> operator*(Dual<N> a, const Dual<N>& b) { return a *= b; }
template <int N> Dual<N> operator/(Dual<N> a, const Dual<N>& b) { return a /= b; }
template <int N> Dual<N> operator-(const Dual<N>& a) {
    Dual<N> r(-a.v);
    for (int k = 0; k < N; ++k) r.d[k] = -a.d[k];
    return r;
}

template <int N> Dual<N> operator+(double a, Dual<N> b) { b.v += a; return b; }
template <int N> Dual<N> operator+(Dual<N> a, double b) { a.v += b; return a; }
template <int N> Dual<N> operator-(double a, const Dual<N>& b) { return Dual<N>(a) - b; }
template <int N> Dual<N> operator-(Dual<N> a, double b) { a.v -= b; return a; }
template <int N> Dual<N> operator*(double a, Dual<N> b) {
    b.v *= a;
    for (int k = 0; k < N; ++k) b.d[k] *= a;
    return b;
}
template <int N> Dual<N> operator*(Dual<N> a, double b) { return b * a; }
template <int N> Dual<N> operator/(Dual<N> a, double b) { return (1.0 / b) * a; }
template <int N> Dual<N> operator/(double a, const Dual<N>& b) { return Dual<N>(a) / b; }

template <int N> bool operator<(const Dual<N>& a, const Dual<N>& b) { return a.v < b.v; }
template <int N> bool operator<(const Dual<N>& a, double b) { return a.v < b; }
template <int N> bool operator<(double a, const Dual<N>& b) { return a < b.v; }
template <int N> bool operator>(const Dual<N>& a, double b) { return a.v > b; }
template <int N> bool operator<=(const Dual<N>& a, double b) { return a.v <= b; }
template <int N> bool operator>=(const Dual<N>& a, double b) { return a.v >= b; }

template <int N> Dual<N> sqrt(const Dual<N>& a) {
    Dual<N> r(std::sqrt(a.v));
    const double s = 0.5 / r.v;
    for (int k = 0; k < N; ++k) r.d[k] = s * a.d[k];
    return r;
}

template <int N> Dual<N> log(const Dual<N>& a) {
    Dual<N> r(std::log(a.v));
    const double s = 1.0 / a.v;
    for (int k = 0; k < N; ++k) r.d[k] = s * a.d[k];
    return r;
}

template <int N> Dual<N> pow(const Dual<N>& a, double e) {
    Dual<N> r(std::pow(a.v, e));
    const double s = (a.v == 0.0 && e > 1.0) ? 0.0 : e * std::pow(a.v, e - 1.0);
    for (int k = 0; k < N; ++k) r.d[k] = s * a.d[k];
    return r;
}

template <int N> Dual<N> abs(const Dual<N>& a) { return a.v < 0.0 ? -a : a; }

inline double value_of(double x) { return x; }
template <int N> double value_of(const Dual<N>& x) { return x.v; }

}  // namespace shellvar
