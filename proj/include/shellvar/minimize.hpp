#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "shellvar/admissibility.hpp"
#include "shellvar/energy.hpp"
#include "shellvar/errors.hpp"
#include "shellvar/grid.hpp"
#include "shellvar/surface.hpp"

namespace shellvar {

struct SolverConfig {
    int max_outer = 4;          // barrier continuation stages (1 stage if mu_init == 0)
    int max_inner = 200;        // gradient steps per stage
    double mu_init = 0.0;       // initial barrier weight; 0 disables the barrier
    double mu_decay = 0.1;
    double step_init = 1.0;
    double step_shrink = 0.5;
    double armijo_c = 1e-4;
    double grad_tol = 1e-6;
    double margin_floor = 1e-10;  // line-search feasibility filter on both margins
    double p = 2.0, q = 2.0;      // exponents for the reported trajectory norms
};

inline void validate_solver_config(const SolverConfig& c) {
    if (c.max_outer < 1 || c.max_inner < 0) throw ValidationError("solver: iteration counts invalid");
    if (c.mu_init < 0.0 || !(c.mu_decay > 0.0 && c.mu_decay < 1.0))
        throw ValidationError("solver: barrier schedule requires mu_init >= 0 and mu_decay in (0,1)");
    if (!(c.step_init > 0.0) || !(c.step_shrink > 0.0 && c.step_shrink < 1.0))
        throw ValidationError("solver: step rule requires step_init > 0 and step_shrink in (0,1)");
    if (!(c.armijo_c > 0.0 && c.armijo_c < 1.0)) throw ValidationError("solver: armijo_c in (0,1)");
    if (!(c.grad_tol > 0.0) || !(c.margin_floor >= 0.0))
        throw ValidationError("solver: grad_tol must be > 0 and margin_floor >= 0");
    if (!(c.p >= 1.0) || !(c.q >= 1.0)) throw ValidationError("solver: norm exponents must be >= 1");
}

/// Discrete W^{1,p} norm of psi and L^q norm of grad a3 (the two quantities
/// controlled by the coerciveness bound along a minimizing trajectory).
struct TrajectoryNorms {
    double psi_w1p = 0.0;
    double a3_grad_lq = 0.0;
};

inline TrajectoryNorms trajectory_norms(const SurfaceConfiguration& psi, const ParamGrid& g,
                                        double p = 2.0, double q = 2.0) {
    double sp = 0.0, sq = 0.0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            int k = g.index(i, j);
            double w = g.weight(i, j);
            sp += w * (std::pow(norm_sq(psi.psi[k]), 0.5 * p) +
                       std::pow(frobenius_sq(psi.grad_psi[k]), 0.5 * p));
            sq += w * std::pow(frobenius_sq(psi.grad_a3[k]), 0.5 * q);
        }
    return {std::pow(sp, 1.0 / p), std::pow(sq, 1.0 / q)};
}

/// Overwrites the gamma_0 nodes with their prescribed positions.
inline void apply_dirichlet(Field3& psi, const BoundaryConditions& bc) {
    for (std::size_t t = 0; t < bc.gamma0.size(); ++t) psi[bc.gamma0[t]] = bc.target_psi[t];
}

struct MinimizeResult {
    SurfaceConfiguration psi_final;
    std::vector<double> energy_history;     // I(psi) at initial + accepted iterates
    std::vector<double> objective_history;  // augmented objective at accepted iterates
    std::vector<double> grad_norm_history;  // projected gradient norm per evaluation
    std::vector<TrajectoryNorms> norm_history;  // one entry per outer stage
    AdmissibilityReport admissibility;
    bool converged = false;
    bool stalled = false;
    int outer_stages = 0;
    int total_iterations = 0;  // accepted steps across all stages
    std::string message;
};

namespace detail {

/// Feasibility filter for a trial field: buildable chain, positive area
/// element, both orientation margins at or above the floor.
inline bool feasible(const SurfaceConfiguration& cfg, const ShellConfig& shell, double floor) {
    FundamentalForms forms;
    CurvatureData curv;
    try {
        forms = fundamental_forms(cfg);
    } catch (const DegenerateMetricError&) {
        return false;
    }
    curv = curvatures(forms);
    for (std::size_t k = 0; k < cfg.psi.size(); ++k) {
        auto [mp, mm] = orientation_margins(curv.H[k], curv.K[k], cfg.sqrt_a[k], shell.epsilon);
        if (!(mp >= floor) || !(mm >= floor)) return false;
    }
    return true;
}

}  // namespace detail

/// Projected gradient descent with Dirichlet projection on gamma_0, an optional
/// log-barrier continuation on the orientation margins, and a backtracking
/// Armijo line search restricted to feasible trials.
inline MinimizeResult minimize(Field3 initial, const EnergySpec& spec, const LoadSpec& loads,
                               const ShellConfig& shell, const BoundaryConditions& bc,
                               const ParamGrid& g, const SolverConfig& cfg = {}) {
    validate_solver_config(cfg);
    validate_spec(spec);
    if (static_cast<int>(initial.size()) != g.size())
        throw ShapeError("minimize: initial field size does not match grid");

    apply_dirichlet(initial, bc);
    SurfaceConfiguration cur = make_surface(std::move(initial), g);
    {
        AdmissibilityReport rep = check_admissible(cur, shell, &bc);
        if (!rep.ok)
            throw AdmissibilityError("minimize: initial configuration is not admissible",
                                     std::move(rep));
    }

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
    model.attach_bc(&bc);

    EnergyModel raw = model;  // barrier-free, penalty-free: the energy I itself
    raw.barrier_mu = 0.0;
    raw.attach_bc(nullptr);

    MinimizeResult res;
    res.energy_history.push_back(objective_value(raw, cur));

    double mu = cfg.mu_init;
    const int stages = cfg.mu_init > 0.0 ? cfg.max_outer : 1;
    bool stage_converged = false;
    for (int stage = 0; stage < stages && !res.stalled; ++stage, mu *= cfg.mu_decay) {
        model.barrier_mu = mu;
        ++res.outer_stages;
        stage_converged = false;
        double f_cur = objective_value(model, cur);
        for (int it = 0; it <= cfg.max_inner; ++it) {
            Field3 grad = objective_gradient(model, cur.psi);
            for (int k : bc.gamma0) grad[k] = Vec3d{};
            double gsq = 0.0;
            for (const Vec3d& v : grad) gsq += norm_sq(v);
            double gnorm = std::sqrt(gsq);
            res.grad_norm_history.push_back(gnorm);
            if (gnorm <= cfg.grad_tol) {
                stage_converged = true;
                break;
            }
            if (it == cfg.max_inner) break;

            double alpha = cfg.step_init;
            bool accepted = false;
            while (alpha >= 1e-16 * cfg.step_init) {
                Field3 trial = cur.psi;
                for (int k = 0; k < g.size(); ++k) trial[k] -= alpha * grad[k];
                apply_dirichlet(trial, bc);
                SurfaceConfiguration trial_cfg;
                try {
                    trial_cfg = make_surface(std::move(trial), g);
                } catch (const DegenerateSurfaceError&) {
                    alpha *= cfg.step_shrink;
                    continue;
                }
                if (!detail::feasible(trial_cfg, shell, cfg.margin_floor)) {
                    alpha *= cfg.step_shrink;
                    continue;
                }
                double f_trial;
                try {
                    f_trial = objective_value(model, trial_cfg);
                } catch (const Error&) {
                    alpha *= cfg.step_shrink;
                    continue;
                }
                if (f_trial <= f_cur - cfg.armijo_c * alpha * gsq) {
                    cur = std::move(trial_cfg);
                    f_cur = f_trial;
                    accepted = true;
                    break;
                }
                alpha *= cfg.step_shrink;
            }
            if (!accepted) {
                res.stalled = true;
                res.message = "line search stalled (no feasible decreasing step)";
                break;
            }
            ++res.total_iterations;
            res.objective_history.push_back(f_cur);
            res.energy_history.push_back(objective_value(raw, cur));
        }
        res.norm_history.push_back(trajectory_norms(cur, g, cfg.p, cfg.q));
    }

    res.converged = stage_converged && !res.stalled;
    if (res.message.empty())
        res.message = res.converged ? "gradient tolerance reached"
                                    : "iteration budget exhausted before tolerance";
    // Position condition is exact by projection; the normal condition is
    // penalty-enforced, so its residual is reported but not gated here.
    res.admissibility = check_admissible(cur, shell, &bc, kBcTolerance,
                                         std::numeric_limits<double>::infinity());
    res.psi_final = std::move(cur);
    return res;
}

}  // namespace shellvar
