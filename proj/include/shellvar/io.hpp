#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "shellvar/admissibility.hpp"
#include "shellvar/energy.hpp"
#include "shellvar/errors.hpp"
#include "shellvar/grid.hpp"
#include "shellvar/minimize.hpp"
#include "shellvar/surface.hpp"
#include "shellvar/verify.hpp"

namespace shellvar {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

struct RunConfig {
    int nx = 0, ny = 0;
    SurfacePreset surface;
    double epsilon = 0.1;
    EnergySpec energy;
    bool has_f = false, has_m = false;
    Field3 f_nodes, m_nodes;  // already expanded to per-node fields
    bool has_bc = false;
    std::vector<std::string> clamp_edges_list;
    double normal_penalty_weight = 0.0;
    SolverConfig solver;
    int verify_polyconvexity_n = 10000;
    int verify_coercivity_n = 10000;
    int verify_blowup_steps = 42;
    std::uint64_t seed = 0;
};

namespace detail {

inline void check_keys(const json& j, std::initializer_list<const char*> allowed,
                       const std::string& path) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw ValidationError(path + ": unknown key '" + it.key() + "'");
    }
}

inline double get_num(const json& j, const char* key, const std::string& path, double fallback,
                      bool required = false) {
    if (!j.contains(key)) {
        if (required) throw ValidationError(path + ": missing required key '" + key + "'");
        return fallback;
    }
    if (!j[key].is_number()) throw ValidationError(path + "." + key + ": expected a number");
    return j[key].get<double>();
}

inline Vec3d get_vec3(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
        !j[2].is_number())
        throw ValidationError(path + ": expected an array of 3 numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline SurfacePreset parse_surface(const json& j) {
    const std::string path = "config.surface";
    if (!j.is_object() || !j.contains("preset"))
        throw ValidationError(path + ": expected an object with a 'preset' key");
    std::string name = j["preset"].get<std::string>();
    if (name == "plate") {
        check_keys(j, {"preset", "x0", "y0", "len1", "len2"}, path);
        Rect r{get_num(j, "x0", path, 0.0), get_num(j, "y0", path, 0.0),
               get_num(j, "len1", path, 1.0), get_num(j, "len2", path, 1.0)};
        return plate_preset(r);
    }
    if (name == "cylinder") {
        check_keys(j, {"preset", "radius", "z0", "z1"}, path);
        return cylinder_preset(get_num(j, "radius", path, 1.0), get_num(j, "z0", path, 0.0),
                               get_num(j, "z1", path, 1.0));
    }
    if (name == "sphere_cap") {
        check_keys(j, {"preset", "radius", "theta0", "theta1"}, path);
        return sphere_cap_preset(get_num(j, "radius", path, 1.0),
                                 get_num(j, "theta0", path, M_PI / 6.0),
                                 get_num(j, "theta1", path, 5.0 * M_PI / 6.0));
    }
    if (name == "torus") {
        check_keys(j, {"preset", "R", "r"}, path);
        return torus_preset(get_num(j, "R", path, 2.0), get_num(j, "r", path, 0.5));
    }
    throw ValidationError(path + ".preset: unknown preset '" + name +
                          "' (expected plate, cylinder, sphere_cap or torus)");
}

inline GammaSpec parse_gamma(const json& j, const std::string& path) {
    if (!j.is_array()) throw ValidationError(path + ": expected an array of primitives");
    GammaSpec spec;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string at = path + "[" + std::to_string(i) + "]";
        const json& p = j[i];
        if (!p.is_object() || !p.contains("type"))
            throw ValidationError(at + ": expected an object with a 'type' key");
        std::string type = p["type"].get<std::string>();
        if (type == "affine") {
            check_keys(p, {"type", "k0", "ka", "kb", "kc"}, at);
            spec.terms.push_back(GammaAffine{get_num(p, "k0", at, 0.0), get_num(p, "ka", at, 0.0),
                                             get_num(p, "kb", at, 0.0), get_num(p, "kc", at, 0.0)});
        } else if (type == "margin_power") {
            check_keys(p, {"type", "side", "exponent", "weight"}, at);
            spec.terms.push_back(GammaMarginPower{static_cast<int>(get_num(p, "side", at, -1.0)),
                                                  get_num(p, "exponent", at, 1.0),
                                                  get_num(p, "weight", at, 1.0)});
        } else if (type == "quad_over_lin") {
            check_keys(p, {"type", "weight"}, at);
            spec.terms.push_back(GammaQuadOverLin{get_num(p, "weight", at, 1.0)});
        } else if (type == "log_barrier") {
            check_keys(p, {"type", "mu"}, at);
            spec.terms.push_back(GammaLogBarrier{get_num(p, "mu", at, 1.0)});
        } else {
            throw ValidationError(at + ".type: unknown primitive '" + type + "'");
        }
    }
    return spec;
}

inline EnergySpec parse_energy(const json& j, double epsilon) {
    const std::string path = "config.energy";
    EnergySpec spec;
    spec.epsilon = epsilon;
    if (!j.is_object() || !j.contains("type"))
        throw ValidationError(path + ": expected an object with a 'type' key");
    std::string type = j["type"].get<std::string>();
    if (type == "helfrich") {
        check_keys(j, {"type", "k_c", "c0", "k_bar", "lambda"}, path);
        spec.variant = HelfrichSpec{get_num(j, "k_c", path, 1.0), get_num(j, "c0", path, 0.0),
                                    get_num(j, "k_bar", path, 0.0), get_num(j, "lambda", path, 0.0)};
    } else if (type == "poly_family") {
        check_keys(j, {"type", "terms", "gamma"}, path);
        if (!j.contains("terms") || !j["terms"].is_array())
            throw ValidationError(path + ".terms: expected an array");
        PolyFamilySpec poly;
        for (std::size_t i = 0; i < j["terms"].size(); ++i) {
            const std::string at = path + ".terms[" + std::to_string(i) + "]";
            const json& t = j["terms"][i];
            check_keys(t, {"a", "b", "gamma", "u", "v", "w"}, at);
            poly.terms.push_back(PolyTerm{get_num(t, "a", at, 1.0), get_num(t, "b", at, 1.0),
                                          get_num(t, "gamma", at, 2.0), get_num(t, "u", at, 0.0),
                                          get_num(t, "v", at, 0.0), get_num(t, "w", at, 0.0)});
        }
        if (j.contains("gamma")) poly.gamma = parse_gamma(j["gamma"], path + ".gamma");
        spec.variant = std::move(poly);
    } else {
        throw ValidationError(path + ".type: unknown energy type '" + type +
                              "' (expected helfrich or poly_family)");
    }
    try {
        validate_spec(spec);
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
    return spec;
}

inline Field3 load_node_file(const std::string& file, int expected, const std::string& path) {
    std::ifstream in(file);
    if (!in) throw ValidationError(path + ": cannot open per-node file '" + file + "'");
    Field3 out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Vec3d v;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &v.x, &v.y, &v.z) != 3)
            throw ValidationError(path + ": malformed row '" + line + "' in '" + file + "'");
        out.push_back(v);
    }
    if (static_cast<int>(out.size()) != expected)
        throw ValidationError(path + ": per-node file has " + std::to_string(out.size()) +
                              " rows, grid has " + std::to_string(expected) + " nodes");
    return out;
}

}  // namespace detail

/// Parses and fully validates a run configuration; unknown keys are rejected
/// and every error message is path-qualified.
inline RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: malformed JSON: ") + e.what());
    }
    detail::check_keys(
        j, {"grid", "surface", "epsilon", "energy", "loads", "bc", "solver", "verify", "seed"},
        "config");

    RunConfig cfg;
    if (!j.contains("grid") || !j["grid"].is_object())
        throw ValidationError("config.grid: required object with nx, ny");
    detail::check_keys(j["grid"], {"nx", "ny"}, "config.grid");
    cfg.nx = static_cast<int>(detail::get_num(j["grid"], "nx", "config.grid", 0.0, true));
    cfg.ny = static_cast<int>(detail::get_num(j["grid"], "ny", "config.grid", 0.0, true));

    if (!j.contains("surface")) throw ValidationError("config.surface: required");
    cfg.surface = detail::parse_surface(j["surface"]);

    cfg.epsilon = detail::get_num(j, "epsilon", "config", 0.1);
    if (!(cfg.epsilon > 0.0)) throw ValidationError("config.epsilon: must be > 0");

    if (j.contains("energy"))
        cfg.energy = detail::parse_energy(j["energy"], cfg.epsilon);
    else {
        cfg.energy.variant = HelfrichSpec{};
        cfg.energy.epsilon = cfg.epsilon;
    }

    const int nodes = cfg.nx * cfg.ny;
    if (j.contains("loads")) {
        const json& l = j["loads"];
        detail::check_keys(l, {"f", "m", "f_file", "m_file"}, "config.loads");
        if (l.contains("f") && l.contains("f_file"))
            throw ValidationError("config.loads: give either 'f' or 'f_file', not both");
        if (l.contains("m") && l.contains("m_file"))
            throw ValidationError("config.loads: give either 'm' or 'm_file', not both");
        if (l.contains("f")) {
            cfg.f_nodes.assign(nodes, detail::get_vec3(l["f"], "config.loads.f"));
            cfg.has_f = true;
        } else if (l.contains("f_file")) {
            cfg.f_nodes = detail::load_node_file(l["f_file"].get<std::string>(), nodes,
                                                 "config.loads.f_file");
            cfg.has_f = true;
        }
        if (l.contains("m")) {
            cfg.m_nodes.assign(nodes, detail::get_vec3(l["m"], "config.loads.m"));
            cfg.has_m = true;
        } else if (l.contains("m_file")) {
            cfg.m_nodes = detail::load_node_file(l["m_file"].get<std::string>(), nodes,
                                                 "config.loads.m_file");
            cfg.has_m = true;
        }
    }

    if (j.contains("bc")) {
        const json& b = j["bc"];
        detail::check_keys(b, {"clamp_edges", "normal_penalty_weight"}, "config.bc");
        if (!b.contains("clamp_edges") || !b["clamp_edges"].is_array())
            throw ValidationError("config.bc.clamp_edges: required array of edge names");
        for (const auto& e : b["clamp_edges"]) cfg.clamp_edges_list.push_back(e.get<std::string>());
        cfg.normal_penalty_weight = detail::get_num(b, "normal_penalty_weight", "config.bc", 0.0);
        cfg.has_bc = true;
    }

    if (j.contains("solver")) {
        const json& s = j["solver"];
        const std::string path = "config.solver";
        detail::check_keys(s,
                           {"max_outer", "max_inner", "mu_init", "mu_decay", "step_init",
                            "step_shrink", "armijo_c", "grad_tol", "margin_floor", "p", "q"},
                           path);
        SolverConfig& c = cfg.solver;
        c.max_outer = static_cast<int>(detail::get_num(s, "max_outer", path, c.max_outer));
        c.max_inner = static_cast<int>(detail::get_num(s, "max_inner", path, c.max_inner));
        c.mu_init = detail::get_num(s, "mu_init", path, c.mu_init);
        c.mu_decay = detail::get_num(s, "mu_decay", path, c.mu_decay);
        c.step_init = detail::get_num(s, "step_init", path, c.step_init);
        c.step_shrink = detail::get_num(s, "step_shrink", path, c.step_shrink);
        c.armijo_c = detail::get_num(s, "armijo_c", path, c.armijo_c);
        c.grad_tol = detail::get_num(s, "grad_tol", path, c.grad_tol);
        c.margin_floor = detail::get_num(s, "margin_floor", path, c.margin_floor);
        c.p = detail::get_num(s, "p", path, c.p);
        c.q = detail::get_num(s, "q", path, c.q);
        try {
            validate_solver_config(c);
        } catch (const ValidationError& e) {
            throw ValidationError(path + ": " + e.what());
        }
    }

    if (j.contains("verify")) {
        const json& v = j["verify"];
        const std::string path = "config.verify";
        detail::check_keys(v, {"polyconvexity_n", "coercivity_n", "blowup_steps"}, path);
        cfg.verify_polyconvexity_n =
            static_cast<int>(detail::get_num(v, "polyconvexity_n", path, 10000.0));
        cfg.verify_coercivity_n =
            static_cast<int>(detail::get_num(v, "coercivity_n", path, 10000.0));
        cfg.verify_blowup_steps = static_cast<int>(detail::get_num(v, "blowup_steps", path, 42.0));
    }

    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer() || j["seed"].get<std::int64_t>() < 0)
            throw ValidationError("config.seed: expected a non-negative integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline json to_json(const AdmissibilityReport& r) {
    return json{{"ok", r.ok},
                {"min_sqrt_a", r.min_sqrt_a},
                {"min_margin_plus", r.min_margin_plus},
                {"min_margin_minus", r.min_margin_minus},
                {"max_eps_kappa", r.max_eps_kappa},
                {"violating_nodes", r.violating_nodes},
                {"bc_residual_psi", r.bc_residual_psi},
                {"bc_residual_a3", r.bc_residual_a3}};
}

inline json to_json(const ConvexityReport& r) {
    json viol = json::array();
    for (const auto& v : r.violations)
        viol.push_back(json{{"t", v.t}, {"lhs", v.lhs}, {"rhs", v.rhs}, {"gap", v.gap}});
    return json{{"samples_tested", r.samples_tested},
                {"max_violation", r.max_violation},
                {"violations", viol},
                {"passed", r.passed}};
}

inline json to_json(const CoercivityReport& r) {
    return json{{"samples_tested", r.samples_tested}, {"empirical_C", r.empirical_C},
                {"C2_shift", r.C2_shift},           {"p", r.p},
                {"q", r.q},                         {"passed", r.passed}};
}

inline json to_json(const BlowupReport& r) {
    json paths = json::array();
    for (const auto& p : r.paths)
        paths.push_back(json{{"side", p.side},
                             {"margin_values", p.margin_values},
                             {"w_values", p.w_values}});
    return json{{"paths", paths},
                {"diverges_plus", r.diverges_plus},
                {"diverges_minus", r.diverges_minus},
                {"passed", r.passed}};
}

inline json to_json(const MinimizeResult& r) {
    json norms = json::array();
    for (const auto& n : r.norm_history)
        norms.push_back(json{{"psi_w1p", n.psi_w1p}, {"a3_grad_lq", n.a3_grad_lq}});
    return json{{"converged", r.converged},
                {"stalled", r.stalled},
                {"outer_stages", r.outer_stages},
                {"total_iterations", r.total_iterations},
                {"energy_history", r.energy_history},
                {"objective_history", r.objective_history},
                {"grad_norm_history", r.grad_norm_history},
                {"norm_history", norms},
                {"admissibility", to_json(r.admissibility)},
                {"message", r.message}};
}

// ---------------------------------------------------------------------------
// CSV and OBJ artifacts
// ---------------------------------------------------------------------------

namespace detail {

inline void append_g17(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

}  // namespace detail

/// Per-node geometry CSV; when the preset carries curvature oracles the last
/// two columns hold (computed - analytic) errors, otherwise they are empty.
inline std::string curvature_csv(const ParamGrid& g, const CurvatureData& curv,
                                 const std::vector<double>& sqrt_a, const SurfacePreset& preset) {
    std::string out = "node_i,node_j,x1,x2,H,K,kappa1,kappa2,sqrt_a,err_H,err_K\n";
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            int k = g.index(i, j);
            out += std::to_string(i) + "," + std::to_string(j) + ",";
            for (double v : {g.x1(i), g.x2(j), curv.H[k], curv.K[k], curv.kappa1[k],
                             curv.kappa2[k], sqrt_a[k]}) {
                detail::append_g17(out, v);
                out += ",";
            }
            if (preset.has_oracle) {
                detail::append_g17(out, curv.H[k] - preset.mean_curv(g.x1(i), g.x2(j)));
                out += ",";
                detail::append_g17(out, curv.K[k] - preset.gauss_curv(g.x1(i), g.x2(j)));
            } else {
                out += ",";
            }
            out += "\n";
        }
    return out;
}

/// Per-node energy-density CSV for the evaluate/minimize artifacts.
inline std::string density_csv(const ParamGrid& g, const SurfaceConfiguration& psi,
                               const EnergySpec& spec, const ShellConfig& shell) {
    FundamentalForms forms = fundamental_forms(psi);
    CurvatureData curv = curvatures(forms);
    PolyReference polyref;
    if (!spec.is_helfrich()) polyref = build_poly_reference(spec.poly(), shell);
    std::string out = "node_i,node_j,W,H,K,sqrt_a,m_plus,m_minus\n";
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            int k = g.index(i, j);
            double w;
            if (spec.is_helfrich()) {
                w = helfrich_density(curv.H[k], curv.K[k], psi.sqrt_a[k], spec.helfrich());
            } else {
                NodeForms<double> f{forms.a[k], forms.b[k], forms.c[k]};
                w = poly_density_at(f, psi.sqrt_a[k], curv.H[k], curv.K[k], spec.poly(), polyref,
                                    k, spec.epsilon);
            }
            auto [mp, mm] =
                orientation_margins(curv.H[k], curv.K[k], psi.sqrt_a[k], shell.epsilon);
            out += std::to_string(i) + "," + std::to_string(j);
            for (double v : {w, curv.H[k], curv.K[k], psi.sqrt_a[k], mp, mm}) {
                out += ",";
                detail::append_g17(out, v);
            }
            out += "\n";
        }
    return out;
}

/// Quad-mesh OBJ of the nodal positions: vertices in node order (k = i*ny + j,
/// 1-based in the file), faces from grid connectivity with periodic wrap.
inline std::string obj_export(const Field3& psi, const ParamGrid& g) {
    if (static_cast<int>(psi.size()) != g.size())
        throw ShapeError("obj_export: field size does not match grid");
    std::string out;
    for (const Vec3d& p : psi) {
        out += "v ";
        detail::append_g17(out, p.x);
        out += " ";
        detail::append_g17(out, p.y);
        out += " ";
        detail::append_g17(out, p.z);
        out += "\n";
    }
    const int imax = g.periodic1 ? g.nx : g.nx - 1;
    const int jmax = g.periodic2 ? g.ny : g.ny - 1;
    for (int i = 0; i < imax; ++i)
        for (int j = 0; j < jmax; ++j) {
            int i1 = (i + 1) % g.nx, j1 = (j + 1) % g.ny;
            out += "f " + std::to_string(g.index(i, j) + 1) + " " +
                   std::to_string(g.index(i1, j) + 1) + " " + std::to_string(g.index(i1, j1) + 1) +
                   " " + std::to_string(g.index(i, j1) + 1) + "\n";
        }
    return out;
}

/// Reads back the vertex records of an OBJ document (round-trip checks).
inline Field3 obj_import_points(const std::string& text) {
    Field3 out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("v ", 0) != 0) continue;
        Vec3d v;
        if (std::sscanf(line.c_str(), "v %lf %lf %lf", &v.x, &v.y, &v.z) != 3)
            throw ValidationError("obj_import: malformed vertex record '" + line + "'");
        out.push_back(v);
    }
    return out;
}

inline json make_report(json body) {
    body["schema_version"] = kSchemaVersion;
    return body;
}

inline std::string render_report(const json& body) { return body.dump(2) + "\n"; }

}  // namespace shellvar
