#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "shellvar/admissibility.hpp"
#include "shellvar/energy.hpp"
#include "shellvar/errors.hpp"
#include "shellvar/forms.hpp"

namespace shellvar {

/// Deterministic scalar draws on top of mt19937_64. The distributions are
/// hand-rolled so reports are bit-identical across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

  private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

inline constexpr double kConvexityTol = 1e-10;

struct ConvexityViolation {
    MPoint p, q;
    double t = 0.0;
    double lhs = 0.0, rhs = 0.0, gap = 0.0;  // gap relative to max(1, |rhs|)
};

struct ConvexityReport {
    int samples_tested = 0;
    std::vector<ConvexityViolation> violations;
    double max_violation = -std::numeric_limits<double>::infinity();  // largest relative gap seen
    bool passed = false;
};

/// Test-only hooks: gamma_override replaces the Gamma part of the polyconvex
/// representation so the probe's falsification power can itself be tested.
struct ProbeHooks {
    std::function<double(double, double, double)> gamma_override;
};

namespace detail {

/// The polyconvex representation W(A, B, a, b, c) of the density.
/// Poly-family F terms use the flat-reference frame (D D^T = I), matching the
/// default reference of the probe sampler.
inline double polyconvex_density(const EnergySpec& spec, const MPoint& pt,
                                 const ProbeHooks* hooks = nullptr) {
    if (spec.is_helfrich()) {
        double w = helfrich_polyconvex(pt.a, pt.b, pt.c, spec.helfrich(), spec.epsilon);
        if (hooks && hooks->gamma_override) w += hooks->gamma_override(pt.a, pt.b, pt.c);
        return w;
    }
    const SymMat2d identity{1.0, 0.0, 1.0};
    double total = 0.0;
    for (const auto& term : spec.poly().terms) {
        auto f_term = [&](double u) {
            Mat32d x{{pt.A.col[0] + u * pt.B.col[0], pt.A.col[1] + u * pt.B.col[1]}};
            SymMat2d s{dot(x.col[0], x.col[0]), dot(x.col[0], x.col[1]), dot(x.col[1], x.col[1])};
            return trace_power_reduced(s, identity, term.gamma);
        };
        total += term.a * f_term(term.u) + term.b * f_term(-term.u);
    }
    if (hooks && hooks->gamma_override)
        total += hooks->gamma_override(pt.a, pt.b, pt.c);
    else
        total += gamma_term(pt.a, pt.b, pt.c, spec.poly().gamma);
    return total;
}

inline MPoint sample_m_point(Rng& rng) {
    MPoint p;
    p.a = rng.log_uniform(1e-2, 1e2);
    p.b = rng.uniform(-p.a, p.a);
    double lo = 2.0 * std::abs(p.b) - p.a;
    p.c = rng.uniform(lo + 1e-6 * p.a, lo + 10.0 * p.a);
    for (int col = 0; col < 2; ++col)
        for (int r = 0; r < 3; ++r) {
            p.A.col[col][r] = rng.normal();
            p.B.col[col][r] = rng.normal();
        }
    return p;
}

inline MPoint lerp(const MPoint& p, const MPoint& q, double t) {
    MPoint r;
    for (int col = 0; col < 2; ++col) {
        r.A.col[col] = t * p.A.col[col] + (1.0 - t) * q.A.col[col];
        r.B.col[col] = t * p.B.col[col] + (1.0 - t) * q.B.col[col];
    }
    r.a = t * p.a + (1.0 - t) * q.a;
    r.b = t * p.b + (1.0 - t) * q.b;
    r.c = t * p.c + (1.0 - t) * q.c;
    return r;
}

inline bool segment_in_m(const MPoint& p, const MPoint& q) {
    for (int k = 1; k <= 9; ++k) {
        MPoint mid = lerp(p, q, k / 10.0);
        if (!m_membership(mid.a, mid.b, mid.c)) return false;
    }
    return true;
}

}  // namespace detail

/// Randomized segment test of the convexity of the polyconvex representation:
/// draws (P, Q) with [P,Q] in M, checks W(tP+(1-t)Q) <= t W(P) + (1-t) W(Q).
inline ConvexityReport polyconvexity_probe(const EnergySpec& spec, int n, std::uint64_t seed,
                                           const ProbeHooks* hooks = nullptr) {
    if (n < 1) throw ValidationError("polyconvexity_probe: sample count must be >= 1");
    validate_spec(spec);
    Rng rng(seed);
    ConvexityReport report;
    for (int s = 0; s < n; ++s) {
        MPoint p = detail::sample_m_point(rng);
        MPoint q;
        int tries = 0;
        do {
            q = detail::sample_m_point(rng);
            if (++tries > 1000)
                throw SamplingError("polyconvexity_probe: could not find a segment inside M");
        } while (!detail::segment_in_m(p, q));
        double t = rng.uniform();
        MPoint mid = detail::lerp(p, q, t);
        double lhs = detail::polyconvex_density(spec, mid, hooks);
        double rhs = t * detail::polyconvex_density(spec, p, hooks) +
                     (1.0 - t) * detail::polyconvex_density(spec, q, hooks);
        double gap = (lhs - rhs) / std::max(1.0, std::abs(rhs));
        report.max_violation = std::max(report.max_violation, gap);
        if (gap > kConvexityTol && report.violations.size() < 100)
            report.violations.push_back({p, q, t, lhs, rhs, gap});
        ++report.samples_tested;
    }
    report.passed = report.max_violation <= kConvexityTol;
    return report;
}

/// Re-evaluates a recorded violation from its stored (P, Q, t); used to assert
/// soundness of the report.
inline bool recheck_violation(const EnergySpec& spec, const ConvexityViolation& v,
                              const ProbeHooks* hooks = nullptr) {
    MPoint mid = detail::lerp(v.p, v.q, v.t);
    double lhs = detail::polyconvex_density(spec, mid, hooks);
    double rhs = v.t * detail::polyconvex_density(spec, v.p, hooks) +
                 (1.0 - v.t) * detail::polyconvex_density(spec, v.q, hooks);
    return (lhs - rhs) / std::max(1.0, std::abs(rhs)) > kConvexityTol;
}

struct CoercivityReport {
    int samples_tested = 0;
    double empirical_C = 0.0;  // sampled infimum of the trace-part ratio
    double C2_shift = 0.0;
    double p = 0.0, q = 0.0;  // reporting exponents (p = gamma_{i0})
    bool passed = false;
};

/// Samples consistent (grad psi, grad a3) nodal states and reports the
/// sampled infimum of trace_sum / (|A|^g0 + |u_{i0}|^g0 |B|^g0), g0 = max gamma_i.
/// Helfrich specs are rejected: they carry no gradient coercivity.
inline CoercivityReport coercivity_probe(const EnergySpec& spec, int n, std::uint64_t seed,
                                         double report_q = 2.0) {
    if (spec.is_helfrich())
        throw UnsupportedSpecError(
            "coercivity_probe: Helfrich densities admit no |grad psi|^p lower bound; "
            "only the Theorem-2 family is supported");
    validate_spec(spec);
    const auto& poly = spec.poly();
    std::size_t i0 = 0;
    for (std::size_t i = 1; i < poly.terms.size(); ++i)
        if (poly.terms[i].gamma > poly.terms[i0].gamma) i0 = i;
    const double g0 = poly.terms[i0].gamma;
    const double u0 = std::abs(poly.terms[i0].u);

    const SymMat2d identity{1.0, 0.0, 1.0};
    Rng rng(seed);
    CoercivityReport report;
    report.p = g0;
    report.q = report_q;
    report.empirical_C = std::numeric_limits<double>::infinity();
    for (int s = 0; s < n; ++s) {
        Mat32d a_mat, b_mat;
        Vec3d nrm;
        do {
            for (int col = 0; col < 2; ++col)
                for (int r = 0; r < 3; ++r) a_mat.col[col][r] = rng.normal();
            nrm = cross(a_mat.col[0], a_mat.col[1]);
        } while (norm(nrm) <= 1e-8);
        nrm = nrm / norm(nrm);
        for (int col = 0; col < 2; ++col) {
            for (int r = 0; r < 3; ++r) b_mat.col[col][r] = rng.normal();
            b_mat.col[col] -= dot(b_mat.col[col], nrm) * nrm;
        }
        NodeForms<double> f = forms_at(a_mat, b_mat);
        double trace_sum = 0.0;
        for (const auto& term : poly.terms) {
            SymMat2d s_plus = f.a - (2.0 * term.u) * f.b + (term.u * term.u) * f.c;
            SymMat2d s_minus = f.a + (2.0 * term.u) * f.b + (term.u * term.u) * f.c;
            trace_sum += term.a * detail::trace_power_reduced(s_plus, identity, term.gamma) +
                         term.b * detail::trace_power_reduced(s_minus, identity, term.gamma);
        }
        double denom = std::pow(frobenius_sq(a_mat), 0.5 * g0) +
                       std::pow(u0, g0) * std::pow(frobenius_sq(b_mat), 0.5 * g0);
        report.empirical_C = std::min(report.empirical_C, trace_sum / denom);
        ++report.samples_tested;
    }
    report.passed = report.empirical_C > 0.0;
    return report;
}

struct BlowupPath {
    int side = -1;  // which margin shrinks: -1 for a-2b+c, +1 for a+2b+c
    std::vector<double> margin_values;
    std::vector<double> w_values;
};

struct BlowupReport {
    std::vector<BlowupPath> paths;
    bool diverges_plus = false, diverges_minus = false;
    bool passed = false;
};

namespace detail {

inline double abc_density(const EnergySpec& spec, double a, double b, double c) {
    if (spec.is_helfrich()) return helfrich_polyconvex(a, b, c, spec.helfrich(), spec.epsilon);
    return gamma_term(a, b, c, spec.poly().gamma);
}

/// Unbounded growth along a geometrically shrinking margin sequence: either
/// the raw 1e6x threshold fires, or the per-step increments stay positive and
/// do not decay geometrically (log/pole growth keeps them level; any bounded
/// primitive decays with the margin).
inline bool judge_divergence(const std::vector<double>& w) {
    const double ref = std::abs(w.front()) + 1e-12;
    if (w.back() > 1e6 * ref) return true;
    const std::size_t k = w.size();
    if (k < 4) return false;
    double d_last = w[k - 1] - w[k - 2];
    double d_prev = w[k - 2] - w[k - 3];
    return d_last > 0.0 && d_prev > 0.0 && d_last >= 0.75 * d_prev;
}

}  // namespace detail

inline constexpr double kBlowupMarginFloor = 1e-12;

/// Shrinks each orientation margin toward 0+ along a path in N with all other
/// quantities bounded and flags whether the (a,b,c)-part of the density blows up.
inline BlowupReport blowup_probe(const EnergySpec& spec, int steps = 42) {
    if (steps < 4) throw ValidationError("blowup_probe: needs at least 4 steps");
    validate_spec(spec);
    BlowupReport report;
    const double ratio = std::pow(kBlowupMarginFloor / 0.5, 1.0 / (steps - 1));
    for (int side : {+1, -1}) {
        BlowupPath path;
        path.side = side;
        double margin = 0.5;
        for (int k = 0; k < steps; ++k, margin *= ratio) {
            // a = 1, |b| = 1/4; the shrinking margin enters through c.
            double a = 1.0;
            double b = side == -1 ? 0.25 : -0.25;
            double c = 2.0 * std::abs(b) - a + margin;
            if (!m_membership(a, b, c))
                throw PathError("blowup_probe: path left N prematurely");
            path.margin_values.push_back(margin);
            path.w_values.push_back(detail::abc_density(spec, a, b, c));
        }
        bool diverged = detail::judge_divergence(path.w_values);
        (side == -1 ? report.diverges_minus : report.diverges_plus) = diverged;
        report.paths.push_back(std::move(path));
    }
    report.passed = report.diverges_plus && report.diverges_minus;
    return report;
}

struct IdentityReport {
    double res_psi_psi = 0.0;   // [psi,psi] - d1 psi ^ d2 psi
    double res_psi_a3 = 0.0;    // [psi,a3] + H d1 psi ^ d2 psi
    double res_a3_a3 = 0.0;     // [a3,a3] - K d1 psi ^ d2 psi
    double res_offset_det = 0.0;  // relative offset-metric determinant residual
};

/// Evaluates the bracket curvature identities and the offset-determinant
/// identity on a configuration; returns max nodal residuals.
inline IdentityReport identity_checks(const SurfaceConfiguration& psi) {
    FundamentalForms forms = fundamental_forms(psi);
    CurvatureData curv = curvatures(forms);
    Field3 br_pp = bracket(psi.grad_psi, psi.grad_psi);
    Field3 br_pn = bracket(psi.grad_psi, psi.grad_a3);
    Field3 br_nn = bracket(psi.grad_a3, psi.grad_a3);
    IdentityReport r;
    for (std::size_t k = 0; k < psi.psi.size(); ++k) {
        Vec3d cr = cross(psi.grad_psi[k].col[0], psi.grad_psi[k].col[1]);
        r.res_psi_psi = std::max(r.res_psi_psi, norm(br_pp[k] - cr));
        r.res_psi_a3 = std::max(r.res_psi_a3, norm(br_pn[k] + curv.H[k] * cr));
        r.res_a3_a3 = std::max(r.res_a3_a3, norm(br_nn[k] - curv.K[k] * cr));
        double kmax = std::max(std::abs(curv.kappa1[k]), std::abs(curv.kappa2[k]));
        double z = 0.5 / (kmax + 1.0);
        for (double zz : {z, -z}) {
            SymMat2d offset = forms.a[k] - (2.0 * zz) * forms.b[k] + (zz * zz) * forms.c[k];
            double lhs = det(offset);
            double fac = (1.0 - zz * curv.kappa1[k]) * (1.0 - zz * curv.kappa2[k]);
            double rhs = fac * fac * det(forms.a[k]);
            r.res_offset_det = std::max(r.res_offset_det,
                                        std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
        }
    }
    return r;
}

}  // namespace shellvar
