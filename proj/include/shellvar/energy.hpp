#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "shellvar/admissibility.hpp"
#include "shellvar/dual.hpp"
#include "shellvar/errors.hpp"
#include "shellvar/forms.hpp"
#include "shellvar/grid.hpp"
#include "shellvar/surface.hpp"
#include "shellvar/vec.hpp"

namespace shellvar {

// ---------------------------------------------------------------------------
// Energy specifications
// ---------------------------------------------------------------------------

struct HelfrichSpec {
    double k_c = 1.0;    // bending rigidity, > 0
    double c0 = 0.0;     // spontaneous curvature
    double k_bar = 0.0;  // Gaussian rigidity
    double lambda = 0.0; // surface tension
};

/// One pair of trace terms: a tr(G(u,v)^{gamma/2}) + b tr(G(-u,w)^{gamma/2}).
struct PolyTerm {
    double a = 1.0, b = 1.0;
    double gamma = 2.0;
    double u = 0.0;
    double v = 0.0, w = 0.0;
};

/// Convex primitives on N = {(a,b,c): a-|b|>0, a-2|b|+c>0}.
struct GammaAffine {
    double k0 = 0.0, ka = 0.0, kb = 0.0, kc = 0.0;  // k0 + ka*a + kb*b + kc*c
};
struct GammaMarginPower {
    int side = -1;          // -1: (a-2b+c)^r, +1: (a+2b+c)^r
    double exponent = 1.0;  // r >= 1
    double weight = 0.0;    // >= 0
};
struct GammaQuadOverLin {
    double weight = 0.0;  // weight * b^2/a
};
struct GammaLogBarrier {
    double mu = 0.0;  // -mu*(log(a-2b+c) + log(a+2b+c))
};
using GammaPrimitive = std::variant<GammaAffine, GammaMarginPower, GammaQuadOverLin, GammaLogBarrier>;

struct GammaSpec {
    std::vector<GammaPrimitive> terms;
};

struct PolyFamilySpec {
    std::vector<PolyTerm> terms;
    GammaSpec gamma;
};

struct EnergySpec {
    std::variant<HelfrichSpec, PolyFamilySpec> variant;
    double epsilon = 0.0;  // half-thickness entering (sqrt_a, eps H sqrt_a, eps^2 K sqrt_a)

    bool is_helfrich() const { return std::holds_alternative<HelfrichSpec>(variant); }
    const HelfrichSpec& helfrich() const { return std::get<HelfrichSpec>(variant); }
    const PolyFamilySpec& poly() const { return std::get<PolyFamilySpec>(variant); }
};

inline void validate_spec(const EnergySpec& spec) {
    if (!(spec.epsilon > 0.0)) throw ValidationError("energy spec: epsilon must be > 0");
    if (spec.is_helfrich()) {
        if (!(spec.helfrich().k_c > 0.0)) throw ValidationError("helfrich: k_c must be > 0");
        return;
    }
    const auto& p = spec.poly();
    if (p.terms.empty()) throw ValidationError("poly family: needs at least one term");
    for (std::size_t i = 0; i < p.terms.size(); ++i) {
        const auto& t = p.terms[i];
        const std::string at = "poly family term " + std::to_string(i);
        if (!(t.a > 0.0)) throw ValidationError(at + ": requires a_i > 0");
        if (!(t.b > 0.0)) throw ValidationError(at + ": requires b_i > 0");
        if (!(t.gamma >= 2.0)) throw ValidationError(at + ": requires gamma_i >= 2");
        if (std::abs(t.v) > spec.epsilon || std::abs(t.w) > spec.epsilon)
            throw ValidationError(at + ": requires (v_i, w_i) in [-eps, eps]^2");
    }
    for (std::size_t i = 0; i < p.gamma.terms.size(); ++i) {
        const std::string at = "gamma primitive " + std::to_string(i);
        if (const auto* mp = std::get_if<GammaMarginPower>(&p.gamma.terms[i])) {
            if (!(mp->exponent >= 1.0)) throw ValidationError(at + ": margin power exponent must be >= 1");
            if (mp->weight < 0.0) throw ValidationError(at + ": margin power weight must be >= 0");
            if (mp->side != 1 && mp->side != -1) throw ValidationError(at + ": side must be +1 or -1");
        } else if (const auto* ql = std::get_if<GammaQuadOverLin>(&p.gamma.terms[i])) {
            if (ql->weight < 0.0) throw ValidationError(at + ": quad-over-lin weight must be >= 0");
        } else if (const auto* lb = std::get_if<GammaLogBarrier>(&p.gamma.terms[i])) {
            if (lb->mu < 0.0) throw ValidationError(at + ": log barrier mu must be >= 0");
        }
    }
}

/// Force density f (conjugate to psi) and couple density m (conjugate to a3);
/// empty fields mean zero.
struct LoadSpec {
    Field3 f;
    Field3 m;
};

// ---------------------------------------------------------------------------
// Pointwise densities
// ---------------------------------------------------------------------------

template <class T, class Spec>
T helfrich_density(const T& H, const T& K, const T& sqrt_a, const Spec& spec) {
    T bend = 2.0 * H + spec.c0;
    return (0.5 * spec.k_c * bend * bend + spec.k_bar * K + spec.lambda) * sqrt_a;
}

/// The Helfrich density rewritten in the polyconvexity variables
/// (a,b,c) = (sqrt_a, eps H sqrt_a, eps^2 K sqrt_a); convex on N.
template <class T>
T helfrich_polyconvex(const T& a, const T& b, const T& c, const HelfrichSpec& s, double eps) {
    return (2.0 * s.k_c / (eps * eps)) * b * b / a + (2.0 * s.k_c * s.c0 / eps) * b +
           (0.5 * s.k_c * s.c0 * s.c0 + s.lambda) * a + (s.k_bar / (eps * eps)) * c;
}

template <class T>
T gamma_term(const T& a, const T& b, const T& c, const GammaSpec& spec) {
    using std::log;
    using std::pow;
    T total(0.0);
    for (const auto& prim : spec.terms) {
        if (const auto* af = std::get_if<GammaAffine>(&prim)) {
            total += af->k0 + af->ka * a + af->kb * b + af->kc * c;
        } else if (const auto* mp = std::get_if<GammaMarginPower>(&prim)) {
            T margin = a + (2.0 * mp->side) * b + c;
            total += mp->weight * pow(margin, mp->exponent);
        } else if (const auto* ql = std::get_if<GammaQuadOverLin>(&prim)) {
            total += ql->weight * b * b / a;
        } else if (const auto* lb = std::get_if<GammaLogBarrier>(&prim)) {
            if (!m_membership(value_of(a), value_of(b), value_of(c)))
                throw NumericDomainError("gamma_term: log barrier undefined outside N");
            total += -lb->mu * (log(a - 2.0 * b + c) + log(a + 2.0 * b + c));
        }
    }
    return total;
}

// ---------------------------------------------------------------------------
// Trace powers of the G matrices
// ---------------------------------------------------------------------------

namespace detail {

/// Eigenvalues of a symmetric 2x2, largest first. Near-coincident eigenvalues
/// collapse to the mean so the dual derivative stays finite (the trace-power
/// sum is smooth there; the split representation is not).
template <class T>
std::pair<T, T> sym2_eigenvalues(const SymMat2<T>& m) {
    using std::sqrt;
    T mean = 0.5 * (m.m11 + m.m22);
    T half_diff = 0.5 * (m.m11 - m.m22);
    T disc = half_diff * half_diff + m.m12 * m.m12;
    double scale = value_of(mean) * value_of(mean) + 1e-300;
    if (value_of(disc) <= 1e-28 * scale) return {mean, mean};
    T s = sqrt(disc);
    return {mean + s, mean - s};
}

/// Principal square root of a PSD 2x2 via (S + sqrt(det) I)/sqrt(tr + 2 sqrt(det)).
template <class T>
SymMat2<T> sqrt_psd2(const SymMat2<T>& s) {
    using std::sqrt;
    T d = det(s);
    if (value_of(d) < 0.0) d = T(0.0);
    T sd = sqrt(d);
    T t = trace(s) + 2.0 * sd;
    if (value_of(t) <= 0.0) return {T(0.0), T(0.0), T(0.0)};
    T inv = 1.0 / sqrt(t);
    return {(s.m11 + sd) * inv, s.m12 * inv, (s.m22 + sd) * inv};
}

template <class T>
T clamped_eig_power(T lambda, double half_gamma, double tr_scale) {
    using std::pow;
    if (value_of(lambda) < -1e-8 * tr_scale)
        throw NumericDomainError("trace_power: eigenvalue " + std::to_string(value_of(lambda)) +
                                 " below clamp threshold");
    if (value_of(lambda) <= 0.0) lambda = T(0.0);
    return pow(lambda, half_gamma);
}

/// tr(G^{gamma/2}) through the rank-2 reduction: the nonzero eigenvalues of
/// G = sum m_ab g^a (x) g^b equal those of S P with S = (m_ab), P = (g^a . g^b),
/// computed as eigenvalues of the symmetric product S^{1/2} P S^{1/2}.
template <class T>
T trace_power_reduced(const SymMat2<T>& s, const SymMat2<T>& p, double gamma) {
    SymMat2<T> rt = sqrt_psd2(s);
    SymMat2<T> b = congruence(rt, p);
    auto [l1, l2] = sym2_eigenvalues(b);
    double tr_scale = std::abs(value_of(trace(b))) + 1e-300;
    return clamped_eig_power(l1, 0.5 * gamma, tr_scale) + clamped_eig_power(l2, 0.5 * gamma, tr_scale);
}

inline double det3(const SymMat3d& m) {
    return m.m11 * (m.m22 * m.m33 - m.m23 * m.m23) - m.m12 * (m.m12 * m.m33 - m.m23 * m.m13) +
           m.m13 * (m.m12 * m.m23 - m.m22 * m.m13);
}

/// Closed-form eigenvalues of a symmetric 3x3 (descending).
inline std::array<double, 3> sym3_eigenvalues(const SymMat3d& m) {
    double p1 = m.m12 * m.m12 + m.m13 * m.m13 + m.m23 * m.m23;
    double tr = trace(m);
    if (p1 < 1e-28 * (tr * tr + 1e-300)) {
        std::array<double, 3> e{m.m11, m.m22, m.m33};
        std::sort(e.begin(), e.end(), std::greater<>());
        return e;
    }
    double q = tr / 3.0;
    double p2 = (m.m11 - q) * (m.m11 - q) + (m.m22 - q) * (m.m22 - q) + (m.m33 - q) * (m.m33 - q) +
                2.0 * p1;
    double p = std::sqrt(p2 / 6.0);
    SymMat3d b{(m.m11 - q) / p, m.m12 / p, m.m13 / p, (m.m22 - q) / p, m.m23 / p, (m.m33 - q) / p};
    double r = std::clamp(det3(b) / 2.0, -1.0, 1.0);
    double phi = std::acos(r) / 3.0;
    double e1 = q + 2.0 * p * std::cos(phi);
    double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    return {e1, tr - e1 - e3, e3};
}

}  // namespace detail

/// Offset dual-metric data of the reference at one node: P_ab = g^a . g^b at
/// (x, v), plus the contravariant vectors themselves for the 3x3 assembly.
struct RefOffsetFrame {
    Vec3d g_sup[2];
    SymMat2d p;
};

inline RefOffsetFrame reference_offset_frame(const Mat32d& ref_grad_phi, const Mat32d& ref_grad_a3,
                                             double v) {
    Vec3d g1 = ref_grad_phi.col[0] + v * ref_grad_a3.col[0];
    Vec3d g2 = ref_grad_phi.col[1] + v * ref_grad_a3.col[1];
    SymMat2d gab{dot(g1, g1), dot(g1, g2), dot(g2, g2)};
    double d = det(gab);
    if (!(d > 1e-24))
        throw ReferenceDegeneracyError("reference offset metric singular (det = " + std::to_string(d) +
                                       ")");
    SymMat2d p = inverse(gab);
    RefOffsetFrame f;
    f.g_sup[0] = p.m11 * g1 + p.m12 * g2;
    f.g_sup[1] = p.m12 * g1 + p.m22 * g2;
    f.p = p;
    return f;
}

/// G(x,psi,u,v) = {a_ab - 2u b_ab + u^2 c_ab} g^a(x,v) (x) g^b(x,v), as a full
/// symmetric 3x3.
inline SymMat3d g_matrix(const SymMat2d& a, const SymMat2d& b, const SymMat2d& c, double u, double v,
                         const Mat32d& ref_grad_phi, const Mat32d& ref_grad_a3) {
    RefOffsetFrame f = reference_offset_frame(ref_grad_phi, ref_grad_a3, v);
    SymMat2d m = a - 2.0 * u * b + (u * u) * c;
    SymMat3d out;
    out = out + sym_outer(m.m11, f.g_sup[0], f.g_sup[0]);
    out = out + sym_outer(2.0 * m.m12, f.g_sup[0], f.g_sup[1]);
    out = out + sym_outer(m.m22, f.g_sup[1], f.g_sup[1]);
    return out;
}

/// lambda_1^{g/2} + lambda_2^{g/2} + lambda_3^{g/2} with eigenvalues clamped
/// at zero; eigenvalues below -1e-8 tr (beyond eigensolver roundoff) are a
/// domain error.
inline double trace_power(const SymMat3d& g, double gamma) {
    if (!(gamma >= 2.0)) throw ValidationError("trace_power: gamma must be >= 2");
    auto eigs = detail::sym3_eigenvalues(g);
    double tr_scale = std::abs(trace(g)) + 1e-300;
    double total = 0.0;
    for (double l : eigs) total += detail::clamped_eig_power(l, 0.5 * gamma, tr_scale);
    return total;
}

/// Per-node reference tables for a poly-family spec: P matrices at the term
/// offsets v_i (outer index term, inner index node).
struct PolyReference {
    std::vector<std::vector<SymMat2d>> p_v, p_w;
};

inline PolyReference build_poly_reference(const PolyFamilySpec& spec, const ShellConfig& shell) {
    PolyReference ref;
    const std::size_t n = shell.reference.grad_psi.size();
    ref.p_v.resize(spec.terms.size());
    ref.p_w.resize(spec.terms.size());
    for (std::size_t t = 0; t < spec.terms.size(); ++t) {
        ref.p_v[t].resize(n);
        ref.p_w[t].resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            ref.p_v[t][k] = reference_offset_frame(shell.reference.grad_psi[k],
                                                   shell.reference.grad_a3[k], spec.terms[t].v)
                                .p;
            ref.p_w[t][k] = reference_offset_frame(shell.reference.grad_psi[k],
                                                   shell.reference.grad_a3[k], spec.terms[t].w)
                                .p;
        }
    }
    return ref;
}

/// The Theorem-2 family density at one node.
template <class T>
T poly_density_at(const NodeForms<T>& f, const T& sqrt_a, const T& H, const T& K,
                  const PolyFamilySpec& spec, const PolyReference& ref, int node, double eps) {
    T total(0.0);
    for (std::size_t t = 0; t < spec.terms.size(); ++t) {
        const PolyTerm& term = spec.terms[t];
        SymMat2<T> s_plus = f.a - (2.0 * term.u) * f.b + (term.u * term.u) * f.c;
        SymMat2<T> s_minus = f.a + (2.0 * term.u) * f.b + (term.u * term.u) * f.c;
        SymMat2<T> pv{T(ref.p_v[t][node].m11), T(ref.p_v[t][node].m12), T(ref.p_v[t][node].m22)};
        SymMat2<T> pw{T(ref.p_w[t][node].m11), T(ref.p_w[t][node].m12), T(ref.p_w[t][node].m22)};
        total += term.a * detail::trace_power_reduced(s_plus, pv, term.gamma) +
                 term.b * detail::trace_power_reduced(s_minus, pw, term.gamma);
    }
    T a = sqrt_a;
    T b = eps * H * sqrt_a;
    T c = eps * eps * K * sqrt_a;
    return total + gamma_term(a, b, c, spec.gamma);
}

// ---------------------------------------------------------------------------
// The discrete functional and its gradient
// ---------------------------------------------------------------------------

/// L(psi, a3(psi)) = sum w (f . psi + m . a3).
inline double load_form(const SurfaceConfiguration& psi, const LoadSpec& loads, const ParamGrid& g) {
    if (!loads.f.empty() && static_cast<int>(loads.f.size()) != g.size())
        throw ShapeError("load_form: f size does not match grid");
    if (!loads.m.empty() && static_cast<int>(loads.m.size()) != g.size())
        throw ShapeError("load_form: m size does not match grid");
    double total = 0.0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            int k = g.index(i, j);
            double v = 0.0;
            if (!loads.f.empty()) v += dot(loads.f[k], psi.psi[k]);
            if (!loads.m.empty()) v += dot(loads.m[k], psi.a3[k]);
            total += g.weight(i, j) * v;
        }
    return total;
}

/// Everything needed to evaluate the (possibly barrier/penalty-augmented)
/// discrete objective. Plain spans into caller-owned data.
struct EnergyModel {
    const ParamGrid* grid = nullptr;
    const EnergySpec* spec = nullptr;
    const LoadSpec* loads = nullptr;        // null = zero loads
    const ShellConfig* shell = nullptr;
    const PolyReference* polyref = nullptr; // required for poly-family specs
    double barrier_mu = 0.0;                // -mu (log m+ + log m-) quadrature term
    const BoundaryConditions* bc = nullptr; // adds the normal penalty on gamma0
    std::vector<std::uint8_t> gamma0_mask;  // built when bc is set
    std::vector<int> gamma0_slot;           // node -> index into bc arrays

    void attach_bc(const BoundaryConditions* b) {
        bc = b;
        gamma0_mask.assign(grid->size(), 0);
        gamma0_slot.assign(grid->size(), -1);
        if (!bc) return;
        for (std::size_t t = 0; t < bc->gamma0.size(); ++t) {
            gamma0_mask[bc->gamma0[t]] = 1;
            gamma0_slot[bc->gamma0[t]] = static_cast<int>(t);
        }
    }
};

namespace detail {

/// Lazily evaluates the geometric chain at single nodes from a psi functor,
/// recomputing stencil neighborhoods on demand. This is what lets the same
/// code run on doubles and on seeded dual numbers.
template <class T, class PsiFn>
struct Chain {
    const ParamGrid& g;
    PsiFn psi;

    Mat32<T> grad_psi(int i, int j) const { return grad_at<T>(g, psi, i, j); }

    Vec3<T> a3(int i, int j) const {
        Mat32<T> gp = grad_psi(i, j);
        Vec3<T> c = cross(gp.col[0], gp.col[1]);
        T n = norm(c);
        if (value_of(n) <= kDegenerateEps)
            throw DegenerateSurfaceError("degenerate surface at node during evaluation",
                                         {g.index(i, j)});
        return c / n;
    }

    Mat32<T> grad_a3(int i, int j) const {
        return grad_at<T>(g, [this](int p, int q) { return a3(p, q); }, i, j);
    }
};

/// Quadrature-weighted objective contribution of one node: energy density
/// (plus barrier) minus load integrand, plus the gamma0 normal penalty.
template <class T, class PsiFn>
T node_objective(const EnergyModel& model, const Chain<T, PsiFn>& chain, int i, int j) {
    using std::log;
    const ParamGrid& g = *model.grid;
    const int k = g.index(i, j);

    Mat32<T> gp = chain.grad_psi(i, j);
    Vec3<T> crossv = cross(gp.col[0], gp.col[1]);
    T sqrt_a = norm(crossv);
    if (value_of(sqrt_a) <= kDegenerateEps)
        throw DegenerateSurfaceError("degenerate surface at node during evaluation", {k});
    Vec3<T> a3 = crossv / sqrt_a;
    Mat32<T> ga3 = chain.grad_a3(i, j);
    NodeForms<T> f = forms_at(gp, ga3);
    NodeCurv<T> curv = curv_at(f);

    T density;
    if (model.spec->is_helfrich()) {
        density = helfrich_density(curv.H, curv.K, sqrt_a, model.spec->helfrich());
    } else {
        density = poly_density_at(f, sqrt_a, curv.H, curv.K, model.spec->poly(), *model.polyref, k,
                                  model.spec->epsilon);
    }
    if (model.barrier_mu > 0.0) {
        const double eps = model.shell->epsilon;
        T m_minus = (1.0 - 2.0 * eps * curv.H + eps * eps * curv.K) * sqrt_a;
        T m_plus = (1.0 + 2.0 * eps * curv.H + eps * eps * curv.K) * sqrt_a;
        if (value_of(m_minus) <= 0.0 || value_of(m_plus) <= 0.0)
            throw NumericDomainError("barrier: nonpositive orientation margin at node " +
                                     std::to_string(k));
        density += -model.barrier_mu * (log(m_minus) + log(m_plus));
    }

    T obj = g.weight(i, j) * density;
    if (model.loads) {
        T load(0.0);
        if (!model.loads->f.empty()) {
            Vec3<T> p = chain.psi(i, j);
            const Vec3d& fv = model.loads->f[k];
            load += fv.x * p.x + fv.y * p.y + fv.z * p.z;
        }
        if (!model.loads->m.empty()) {
            const Vec3d& mv = model.loads->m[k];
            load += mv.x * a3.x + mv.y * a3.y + mv.z * a3.z;
        }
        obj -= g.weight(i, j) * load;
    }
    if (model.bc && model.gamma0_mask[k]) {
        const Vec3d& tgt = model.bc->target_a3[model.gamma0_slot[k]];
        Vec3<T> d{a3.x - tgt.x, a3.y - tgt.y, a3.z - tgt.z};
        obj += model.bc->normal_penalty_weight * norm_sq(d);
    }
    return obj;
}

}  // namespace detail

/// Value of the augmented discrete objective. Uses the cached configuration
/// path (identical stencils to the chain evaluator).
inline double objective_value(const EnergyModel& model, const SurfaceConfiguration& psi) {
    const ParamGrid& g = *model.grid;
    auto at = [&psi, &g](int i, int j) { return psi.psi[g.index(i, j)]; };
    detail::Chain<double, decltype(at)> chain{g, at};
    double total = 0.0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) total += detail::node_objective(model, chain, i, j);
    return total;
}

/// Gradient of the augmented objective with respect to nodal psi values, by
/// forward-mode dual numbers seeded one node at a time and evaluated over the
/// node's two-stencil influence window.
inline Field3 objective_gradient(const EnergyModel& model, const Field3& psi) {
    const ParamGrid& g = *model.grid;
    Field3 grad(g.size());

    std::vector<std::vector<int>> win1(g.nx), win2(g.ny);
    for (int i = 0; i < g.nx; ++i) win1[i] = two_step_influence(g.nx, g.periodic1, i);
    for (int j = 0; j < g.ny; ++j) win2[j] = two_step_influence(g.ny, g.periodic2, j);

    using D = Dual<3>;
    for (int ni = 0; ni < g.nx; ++ni)
        for (int nj = 0; nj < g.ny; ++nj) {
            const int n = g.index(ni, nj);
            auto seeded = [&](int i, int j) -> Vec3<D> {
                const Vec3d& p = psi[g.index(i, j)];
                Vec3<D> r{D(p.x), D(p.y), D(p.z)};
                if (i == ni && j == nj) {
                    r.x.d[0] = 1.0;
                    r.y.d[1] = 1.0;
                    r.z.d[2] = 1.0;
                }
                return r;
            };
            detail::Chain<D, decltype(seeded)> chain{g, seeded};
            D obj(0.0);
            for (int p : win1[ni])
                for (int q : win2[nj]) obj += detail::node_objective(model, chain, p, q);
            grad[n] = {obj.d[0], obj.d[1], obj.d[2]};
        }
    return grad;
}

/// I(psi) = integral of W - L(psi, a3(psi)). Throws AdmissibilityError (with
/// the full report embedded) on an inadmissible configuration.
inline double total_energy(const SurfaceConfiguration& psi, const EnergySpec& spec,
                           const LoadSpec& loads, const ShellConfig& shell, const ParamGrid& g) {
    AdmissibilityReport rep = check_admissible(psi, shell);
    if (!rep.ok)
        throw AdmissibilityError("total_energy: configuration outside V^eps (" +
                                     std::to_string(rep.violating_nodes.size()) + " violating nodes)",
                                 std::move(rep));
    PolyReference polyref;
    EnergyModel model;
    model.grid = &g;
    model.spec = &spec;
    model.loads = &loads;
    model.shell = &shell;
    if (!spec.is_helfrich()) {
        polyref = build_poly_reference(spec.poly(), shell);
        model.polyref = &polyref;
    }
    return objective_value(model, psi);
}

/// Gradient of I with respect to nodal psi values (no barrier, no penalty).
inline Field3 energy_gradient(const SurfaceConfiguration& psi, const EnergySpec& spec,
                              const LoadSpec& loads, const ShellConfig& shell, const ParamGrid& g) {
    AdmissibilityReport rep = check_admissible(psi, shell);
    if (!rep.ok)
        throw AdmissibilityError("energy_gradient: configuration outside V^eps", std::move(rep));
    PolyReference polyref;
    EnergyModel model;
    model.grid = &g;
    model.spec = &spec;
    model.loads = &loads;
    model.shell = &shell;
    if (!spec.is_helfrich()) {
        polyref = build_poly_reference(spec.poly(), shell);
        model.polyref = &polyref;
    }
    return objective_gradient(model, psi.psi);
}

}  // namespace shellvar
