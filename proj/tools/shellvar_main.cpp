// shellvar: curvature, energy evaluation, density verification and energy
// minimization for discretized shell midsurfaces on structured grids.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "shellvar/admissibility.hpp"
#include "shellvar/energy.hpp"
#include "shellvar/forms.hpp"
#include "shellvar/grid.hpp"
#include "shellvar/io.hpp"
#include "shellvar/minimize.hpp"
#include "shellvar/surface.hpp"
#include "shellvar/verify.hpp"

namespace {

using namespace shellvar;
namespace fs = std::filesystem;

struct Cli {
    std::string config_path;
    std::string out_dir = ".";
    std::int64_t seed = -1;  // -1: use config seed
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PathError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path);
    if (!out) throw PathError("cannot write '" + path.string() + "'");
    out << content;
}

struct Setup {
    ParamGrid grid;
    SurfaceConfiguration reference;
    ShellConfig shell;
};

Setup build_setup(const RunConfig& cfg) {
    Setup s;
    s.grid = grid_for(cfg.surface, cfg.nx, cfg.ny);
    s.reference = make_surface(sample(cfg.surface, s.grid), s.grid);
    s.shell = make_shell(cfg.epsilon, s.reference);
    return s;
}

LoadSpec build_loads(const RunConfig& cfg) {
    LoadSpec loads;
    if (cfg.has_f) loads.f = cfg.f_nodes;
    if (cfg.has_m) loads.m = cfg.m_nodes;
    return loads;
}

int cmd_curvature(const RunConfig& cfg, const Cli& cli) {
    ParamGrid grid = grid_for(cfg.surface, cfg.nx, cfg.ny);
    SurfaceConfiguration surf = make_surface(sample(cfg.surface, grid), grid);
    FundamentalForms forms = fundamental_forms(surf);
    CurvatureData curv = curvatures(forms);

    double area = 0.0, total_k = 0.0, max_err_h = 0.0, max_err_k = 0.0;
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.ny; ++j) {
            int k = grid.index(i, j);
            area += grid.weight(i, j) * surf.sqrt_a[k];
            total_k += grid.weight(i, j) * curv.K[k] * surf.sqrt_a[k];
            if (cfg.surface.has_oracle) {
                max_err_h = std::max(
                    max_err_h, std::abs(curv.H[k] - cfg.surface.mean_curv(grid.x1(i), grid.x2(j))));
                max_err_k = std::max(
                    max_err_k, std::abs(curv.K[k] - cfg.surface.gauss_curv(grid.x1(i), grid.x2(j))));
            }
        }

    json summary = make_report({{"command", "curvature"},
                                {"preset", cfg.surface.name},
                                {"nx", grid.nx},
                                {"ny", grid.ny},
                                {"area", area},
                                {"total_gauss_curvature", total_k}});
    if (cfg.surface.has_oracle) {
        summary["max_abs_err_H"] = max_err_h;
        summary["max_abs_err_K"] = max_err_k;
    }
    write_file(fs::path(cli.out_dir) / "curvature.csv",
               curvature_csv(grid, curv, surf.sqrt_a, cfg.surface));
    write_file(fs::path(cli.out_dir) / "curvature.json", render_report(summary));
    std::cout << render_report(summary);
    return 0;
}

int cmd_evaluate(const RunConfig& cfg, const Cli& cli) {
    Setup s = build_setup(cfg);
    LoadSpec loads = build_loads(cfg);
    AdmissibilityReport adm = check_admissible(s.reference, s.shell);
    json report = make_report({{"command", "evaluate"}, {"admissibility", to_json(adm)}});
    int status = 0;
    if (adm.ok) {
        report["total_energy"] = total_energy(s.reference, cfg.energy, loads, s.shell, s.grid);
        write_file(fs::path(cli.out_dir) / "density.csv",
                   density_csv(s.grid, s.reference, cfg.energy, s.shell));
    } else {
        report["total_energy"] = nullptr;
        status = 1;
    }
    write_file(fs::path(cli.out_dir) / "evaluate.json", render_report(report));
    std::cout << render_report(report);
    return status;
}

int cmd_verify(const RunConfig& cfg, const Cli& cli, std::uint64_t seed) {
    ConvexityReport convexity = polyconvexity_probe(cfg.energy, cfg.verify_polyconvexity_n, seed);
    BlowupReport blowup = blowup_probe(cfg.energy, cfg.verify_blowup_steps);
    json report = make_report({{"command", "verify"},
                               {"seed", seed},
                               {"polyconvexity", to_json(convexity)},
                               {"blowup", to_json(blowup)}});
    bool all_passed = convexity.passed && blowup.passed;
    if (cfg.energy.is_helfrich()) {
        report["coercivity"] = {{"skipped", true},
                                {"reason", "no gradient coercivity bound for this density family"}};
    } else {
        CoercivityReport coercivity =
            coercivity_probe(cfg.energy, cfg.verify_coercivity_n, seed + 1);
        report["coercivity"] = to_json(coercivity);
        all_passed = all_passed && coercivity.passed;
    }
    report["passed"] = all_passed;
    if (convexity.passed && !blowup.passed)
        report["summary"] = "density is polyconvex but not orientation-preserving";
    write_file(fs::path(cli.out_dir) / "verify.json", render_report(report));
    std::cout << render_report(report);
    return all_passed ? 0 : 1;
}

int cmd_minimize(const RunConfig& cfg, const Cli& cli) {
    Setup s = build_setup(cfg);
    LoadSpec loads = build_loads(cfg);
    std::vector<std::string> edges = cfg.clamp_edges_list;
    if (!cfg.has_bc) {
        // Default: clamp every non-periodic edge.
        if (!s.grid.periodic1) edges.insert(edges.end(), {"west", "east"});
        if (!s.grid.periodic2) edges.insert(edges.end(), {"south", "north"});
        if (edges.empty())
            throw ValidationError("minimize: closed surface needs an explicit bc block");
    }
    BoundaryConditions bc = clamp_edges(edges, s.reference, s.grid, cfg.normal_penalty_weight);
    MinimizeResult res =
        minimize(s.reference.psi, cfg.energy, loads, s.shell, bc, s.grid, cfg.solver);

    json report = make_report(to_json(res));
    report["command"] = "minimize";
    write_file(fs::path(cli.out_dir) / "minimize.json", render_report(report));
    write_file(fs::path(cli.out_dir) / "final.obj", obj_export(res.psi_final.psi, s.grid));
    write_file(fs::path(cli.out_dir) / "final.csv",
               density_csv(s.grid, res.psi_final, cfg.energy, s.shell));
    std::cout << render_report(report);
    return res.converged ? 0 : 1;
}

void emit_error(const std::string& type, const std::string& msg) {
    std::cerr << json{{"error", {{"type", type}, {"message", msg}}}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"variational shell toolkit: curvature, energy, verification, minimization"};
    app.require_subcommand(1);

    Cli cli;
    std::string command;
    for (const char* name : {"curvature", "evaluate", "verify", "minimize"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", cli.config_path, "JSON run configuration")->required();
        sub->add_option("--out", cli.out_dir, "output directory");
        sub->add_option("--seed", cli.seed, "override the config RNG seed");
        sub->callback([&command, name] { command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        RunConfig cfg = parse_config(slurp(cli.config_path));
        std::uint64_t seed = cli.seed >= 0 ? static_cast<std::uint64_t>(cli.seed) : cfg.seed;
        if (command == "curvature") return cmd_curvature(cfg, cli);
        if (command == "evaluate") return cmd_evaluate(cfg, cli);
        if (command == "verify") return cmd_verify(cfg, cli, seed);
        if (command == "minimize") return cmd_minimize(cfg, cli);
        emit_error("internal", "unknown command");
        return 2;
    } catch (const ValidationError& e) {
        emit_error("validation", e.what());
        return 2;
    } catch (const PathError& e) {
        emit_error("path", e.what());
        return 2;
    } catch (const InvalidGridError& e) {
        emit_error("grid", e.what());
        return 2;
    } catch (const ShapeError& e) {
        emit_error("shape", e.what());
        return 2;
    } catch (const UnsupportedSpecError& e) {
        emit_error("unsupported", e.what());
        return 2;
    } catch (const AdmissibilityError& e) {
        emit_error("admissibility", e.what());
        return 1;
    } catch (const Error& e) {
        emit_error("numeric", e.what());
        return 1;
    } catch (const std::exception& e) {
        emit_error("internal", e.what());
        return 2;
    }
}
