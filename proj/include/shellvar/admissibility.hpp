#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "shellvar/errors.hpp"
#include "shellvar/forms.hpp"
#include "shellvar/grid.hpp"
#include "shellvar/surface.hpp"

namespace shellvar {

/// Prescribed position and normal on gamma_0, plus the penalty weight for the
/// (nonlinear) normal condition.
struct BoundaryConditions {
    std::vector<int> gamma0;     // flat node indices, sorted
    Field3 target_psi;           // parallel to gamma0
    Field3 target_a3;            // parallel to gamma0, unit vectors
    double normal_penalty_weight = 0.0;
};

/// Builds gamma0 from boundary edge names ("west","east","south","north" =
/// i=0, i=nx-1, j=0, j=ny-1) with targets taken from a reference surface.
inline BoundaryConditions clamp_edges(const std::vector<std::string>& edges,
                                      const SurfaceConfiguration& reference, const ParamGrid& g,
                                      double normal_penalty_weight = 0.0) {
    std::vector<std::uint8_t> pick(g.size(), 0);
    for (const auto& e : edges) {
        if (e == "west" && !g.periodic1)
            for (int j = 0; j < g.ny; ++j) pick[g.index(0, j)] = 1;
        else if (e == "east" && !g.periodic1)
            for (int j = 0; j < g.ny; ++j) pick[g.index(g.nx - 1, j)] = 1;
        else if (e == "south" && !g.periodic2)
            for (int i = 0; i < g.nx; ++i) pick[g.index(i, 0)] = 1;
        else if (e == "north" && !g.periodic2)
            for (int i = 0; i < g.nx; ++i) pick[g.index(i, g.ny - 1)] = 1;
        else if (e != "west" && e != "east" && e != "south" && e != "north")
            throw ValidationError("clamp_edges: unknown edge name '" + e + "'");
    }
    BoundaryConditions bc;
    bc.normal_penalty_weight = normal_penalty_weight;
    for (int k = 0; k < g.size(); ++k)
        if (pick[k]) {
            bc.gamma0.push_back(k);
            bc.target_psi.push_back(reference.psi[k]);
            bc.target_a3.push_back(reference.a3[k]);
        }
    if (bc.gamma0.size() < 2)
        throw ValidationError("clamp_edges: gamma0 must contain at least 2 boundary nodes");
    return bc;
}

/// Half-thickness plus the fully-derived reference midsurface.
struct ShellConfig {
    double epsilon = 0.0;
    SurfaceConfiguration reference;
    FundamentalForms ref_forms;
    CurvatureData ref_curv;
};

inline ShellConfig make_shell(double epsilon, SurfaceConfiguration reference) {
    if (!(epsilon > 0.0)) throw ValidationError("make_shell: epsilon must be > 0");
    ShellConfig s;
    s.epsilon = epsilon;
    s.ref_forms = fundamental_forms(reference);
    s.ref_curv = curvatures(s.ref_forms);
    s.reference = std::move(reference);
    double worst = 0.0;
    for (std::size_t k = 0; k < s.ref_curv.kappa1.size(); ++k)
        worst = std::max({worst, std::abs(epsilon * s.ref_curv.kappa1[k]),
                          std::abs(epsilon * s.ref_curv.kappa2[k])});
    if (!(worst < 1.0))
        throw ValidationError("make_shell: reference violates max|eps*kappa| < 1 (got " +
                              std::to_string(worst) + ")");
    return s;
}

/// A point of the polyconvexity domain M.
struct MPoint {
    Mat32d A, B;         // stand-ins for grad psi, grad a3
    double a = 0.0, b = 0.0, c = 0.0;  // sqrt_a, eps H sqrt_a, eps^2 K sqrt_a
};

/// Membership in M (and in the scalar slice N): a - |b| > 0 and a - 2|b| + c > 0.
inline bool m_membership(double a, double b, double c) {
    return a - std::abs(b) > 0.0 && a - 2.0 * std::abs(b) + c > 0.0;
}

/// det grad Psi at the two shell faces: m_minus at z = +eps, m_plus at z = -eps.
inline std::pair<double, double> orientation_margins(double H, double K, double sqrt_a, double eps) {
    double m_minus = (1.0 - 2.0 * eps * H + eps * eps * K) * sqrt_a;
    double m_plus = (1.0 + 2.0 * eps * H + eps * eps * K) * sqrt_a;
    return {m_plus, m_minus};
}

struct AdmissibilityReport {
    bool ok = false;
    double min_sqrt_a = 0.0;
    double min_margin_plus = 0.0;
    double min_margin_minus = 0.0;
    double max_eps_kappa = 0.0;
    std::vector<int> violating_nodes;
    double bc_residual_psi = 0.0;  // max |psi - target| over gamma0
    double bc_residual_a3 = 0.0;   // max |a3(psi) - target| over gamma0
};

inline constexpr double kBcTolerance = 1e-9;

/// Evaluates every V^eps condition nodewise; bc may be null (no gamma0 check).
/// The position and normal residuals on gamma0 carry separate tolerances: the
/// position condition is projected exactly by the solver while the normal
/// condition is penalty-enforced, so callers may want to gate only the former.
inline AdmissibilityReport check_admissible(const SurfaceConfiguration& psi, const ShellConfig& shell,
                                            const BoundaryConditions* bc = nullptr,
                                            double bc_tol = kBcTolerance,
                                            double bc_tol_a3 = kBcTolerance) {
    if (psi.psi.size() != shell.reference.psi.size())
        throw ShapeError("check_admissible: configuration and shell reference live on different grids");
    AdmissibilityReport r;
    FundamentalForms forms = fundamental_forms(psi);
    CurvatureData curv = curvatures(forms);
    r.min_sqrt_a = std::numeric_limits<double>::infinity();
    r.min_margin_plus = std::numeric_limits<double>::infinity();
    r.min_margin_minus = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < psi.psi.size(); ++k) {
        auto [mp, mm] = orientation_margins(curv.H[k], curv.K[k], psi.sqrt_a[k], shell.epsilon);
        double ek = std::max(std::abs(shell.epsilon * curv.kappa1[k]),
                             std::abs(shell.epsilon * curv.kappa2[k]));
        r.min_sqrt_a = std::min(r.min_sqrt_a, psi.sqrt_a[k]);
        r.min_margin_plus = std::min(r.min_margin_plus, mp);
        r.min_margin_minus = std::min(r.min_margin_minus, mm);
        r.max_eps_kappa = std::max(r.max_eps_kappa, ek);
        if (!(psi.sqrt_a[k] > 0.0) || !(mp > 0.0) || !(mm > 0.0) || !(ek < 1.0))
            r.violating_nodes.push_back(static_cast<int>(k));
    }
    if (bc) {
        for (std::size_t t = 0; t < bc->gamma0.size(); ++t) {
            int k = bc->gamma0[t];
            r.bc_residual_psi = std::max(r.bc_residual_psi, norm(psi.psi[k] - bc->target_psi[t]));
            r.bc_residual_a3 = std::max(r.bc_residual_a3, norm(psi.a3[k] - bc->target_a3[t]));
        }
    }
    r.ok = r.violating_nodes.empty() && r.min_sqrt_a > 0.0 && r.min_margin_plus > 0.0 &&
           r.min_margin_minus > 0.0 && r.max_eps_kappa < 1.0 && r.bc_residual_psi <= bc_tol &&
           r.bc_residual_a3 <= bc_tol_a3;
    return r;
}

/// Raised by energy evaluation on an inadmissible configuration.
struct AdmissibilityError : Error {
    AdmissibilityReport report;
    AdmissibilityError(const std::string& msg, AdmissibilityReport r)
        : Error(msg), report(std::move(r)) {}
};

}  // namespace shellvar
