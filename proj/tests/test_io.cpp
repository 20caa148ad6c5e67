#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <variant>

#include "shellvar/io.hpp"

using namespace shellvar;

TEST_CASE("parse_config fills defaults from a minimal document") {
    RunConfig cfg = parse_config(R"({"grid":{"nx":9,"ny":7},"surface":{"preset":"plate"}})");
    CHECK(cfg.nx == 9);
    CHECK(cfg.ny == 7);
    CHECK(cfg.surface.name == "plate");
    CHECK(cfg.epsilon == 0.1);
    CHECK(cfg.energy.is_helfrich());
    CHECK(cfg.energy.epsilon == 0.1);
    CHECK(!cfg.has_f);
    CHECK(!cfg.has_m);
    CHECK(!cfg.has_bc);
    CHECK(cfg.solver.grad_tol == SolverConfig{}.grad_tol);
    CHECK(cfg.verify_polyconvexity_n == 10000);
    CHECK(cfg.verify_blowup_steps == 42);
    CHECK(cfg.seed == 0);
}

TEST_CASE("parse_config reads a fully specified document") {
    RunConfig cfg = parse_config(R"({
      "grid": {"nx": 16, "ny": 24},
      "surface": {"preset": "torus", "R": 2.0, "r": 0.5},
      "epsilon": 0.05,
      "energy": {
        "type": "poly_family",
        "terms": [{"a": 1.0, "b": 0.7, "gamma": 2.5, "u": 0.04, "v": 0.01, "w": -0.01}],
        "gamma": [{"type": "log_barrier", "mu": 0.4},
                  {"type": "affine", "ka": -1.0},
                  {"type": "margin_power", "side": 1, "exponent": 2.0, "weight": 0.3},
                  {"type": "quad_over_lin", "weight": 0.2}]
      },
      "loads": {"f": [0.0, 0.0, -0.001]},
      "bc": {"clamp_edges": ["west", "east"], "normal_penalty_weight": 0.5},
      "solver": {"max_inner": 50, "grad_tol": 1e-5, "mu_init": 0.01},
      "verify": {"polyconvexity_n": 500, "coercivity_n": 600, "blowup_steps": 30},
      "seed": 99
    })");
    CHECK(cfg.surface.name == "torus");
    CHECK(cfg.surface.periodic1);
    CHECK(cfg.surface.periodic2);
    CHECK(cfg.epsilon == 0.05);
    REQUIRE(!cfg.energy.is_helfrich());
    const PolyFamilySpec& p = cfg.energy.poly();
    REQUIRE(p.terms.size() == 1);
    CHECK(p.terms[0].gamma == 2.5);
    CHECK(p.terms[0].u == 0.04);
    REQUIRE(p.gamma.terms.size() == 4);
    CHECK(std::holds_alternative<GammaLogBarrier>(p.gamma.terms[0]));
    CHECK(std::holds_alternative<GammaAffine>(p.gamma.terms[1]));
    CHECK(std::holds_alternative<GammaMarginPower>(p.gamma.terms[2]));
    CHECK(std::holds_alternative<GammaQuadOverLin>(p.gamma.terms[3]));
    REQUIRE(cfg.has_f);
    CHECK(cfg.f_nodes.size() == 16 * 24);
    CHECK(cfg.f_nodes[5].z == -0.001);
    REQUIRE(cfg.has_bc);
    CHECK(cfg.clamp_edges_list == std::vector<std::string>{"west", "east"});
    CHECK(cfg.normal_penalty_weight == 0.5);
    CHECK(cfg.solver.max_inner == 50);
    CHECK(cfg.solver.grad_tol == 1e-5);
    CHECK(cfg.solver.mu_init == 0.01);
    CHECK(cfg.verify_polyconvexity_n == 500);
    CHECK(cfg.verify_coercivity_n == 600);
    CHECK(cfg.verify_blowup_steps == 30);
    CHECK(cfg.seed == 99);
}

TEST_CASE("parse_config rejects unknown keys with path-qualified messages") {
    CHECK_THROWS_WITH_AS(
        parse_config(R"({"grid":{"nx":4,"ny":4},"surface":{"preset":"plate"},"bogus":1})"),
        doctest::Contains("config: unknown key 'bogus'"), ValidationError);
    CHECK_THROWS_WITH_AS(
        parse_config(R"({"grid":{"nx":4,"ny":4,"nz":4},"surface":{"preset":"plate"}})"),
        doctest::Contains("config.grid: unknown key 'nz'"), ValidationError);
    CHECK_THROWS_WITH_AS(
        parse_config(R"({"grid":{"nx":4,"ny":4},"surface":{"preset":"plate","R":1.0}})"),
        doctest::Contains("config.surface: unknown key 'R'"), ValidationError);
    CHECK_THROWS_WITH_AS(
        parse_config(R"({"grid":{"nx":4,"ny":4},"surface":{"preset":"plate"},
                         "solver":{"stepsize":0.1}})"),
        doctest::Contains("config.solver: unknown key 'stepsize'"), ValidationError);
    CHECK_THROWS_WITH_AS(
        parse_config(R"({"grid":{"nx":4,"ny":4},"surface":{"preset":"blob"}})"),
        doctest::Contains("unknown preset 'blob'"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"grid":{"ny":4},"surface":{"preset":"plate"}})"),
                         doctest::Contains("config.grid: missing required key 'nx'"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(parse_config("{not json"), doctest::Contains("config: malformed JSON"),
                         ValidationError);
}

TEST_CASE("parse_config surfaces energy validation with the config path prefix") {
    CHECK_THROWS_WITH_AS(
        parse_config(R"({"grid":{"nx":4,"ny":4},"surface":{"preset":"plate"},
          "energy":{"type":"poly_family","terms":[{"a":1,"b":1,"gamma":1.5}]}})"),
        doctest::Contains("config.energy: "), ValidationError);
    CHECK_THROWS_WITH_AS(
        parse_config(R"({"grid":{"nx":4,"ny":4},"surface":{"preset":"plate"},
          "energy":{"type":"poly_family","terms":[{"a":1,"b":1,"gamma":1.5}]}})"),
        doctest::Contains("gamma_i >= 2"), ValidationError);
    // v outside the admissible offset square for epsilon = 0.1.
    CHECK_THROWS_WITH_AS(
        parse_config(R"({"grid":{"nx":4,"ny":4},"surface":{"preset":"plate"},
          "energy":{"type":"poly_family","terms":[{"a":1,"b":1,"gamma":2,"v":0.5}]}})"),
        doctest::Contains("(v_i, w_i) in [-eps, eps]^2"), ValidationError);
}

TEST_CASE("parse_config loads per-node files and rejects conflicts") {
    CHECK_THROWS_WITH_AS(
        parse_config(R"({"grid":{"nx":4,"ny":4},"surface":{"preset":"plate"},
                         "loads":{"f":[0,0,1],"f_file":"x.csv"}})"),
        doctest::Contains("either 'f' or 'f_file'"), ValidationError);

    const char* path = "io_test_loads.csv";
    {
        std::ofstream out(path);
        for (int k = 0; k < 16; ++k) out << "0.0,0.0," << 0.125 * k << "\n";
    }
    RunConfig cfg = parse_config(R"({"grid":{"nx":4,"ny":4},"surface":{"preset":"plate"},
                                     "loads":{"f_file":"io_test_loads.csv"}})");
    REQUIRE(cfg.has_f);
    REQUIRE(cfg.f_nodes.size() == 16);
    CHECK(cfg.f_nodes[8].z == 1.0);

    CHECK_THROWS_WITH_AS(
        parse_config(R"({"grid":{"nx":5,"ny":5},"surface":{"preset":"plate"},
                         "loads":{"f_file":"io_test_loads.csv"}})"),
        doctest::Contains("16 rows, grid has 25 nodes"), ValidationError);
    std::remove(path);

    CHECK_THROWS_WITH_AS(
        parse_config(R"({"grid":{"nx":4,"ny":4},"surface":{"preset":"plate"},
                         "loads":{"m_file":"does_not_exist.csv"}})"),
        doctest::Contains("cannot open per-node file"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"grid":{"nx":4,"ny":4},"surface":{"preset":"plate"},
                                          "seed":-3})"),
                         doctest::Contains("config.seed"), ValidationError);
}

TEST_CASE("curvature and density CSVs carry the expected headers and rows") {
    SurfacePreset torus = torus_preset(2.0, 0.5);
    ParamGrid g = grid_for(torus, 8, 8);
    SurfaceConfiguration surf = make_surface(sample(torus, g), g);
    FundamentalForms forms = fundamental_forms(surf);
    CurvatureData curv = curvatures(forms);

    std::string csv = curvature_csv(g, curv, surf.sqrt_a, torus);
    CHECK(csv.rfind("node_i,node_j,x1,x2,H,K,kappa1,kappa2,sqrt_a,err_H,err_K\n", 0) == 0);
    std::size_t rows = 0;
    for (char c : csv) rows += c == '\n';
    CHECK(rows == 1 + 64);

    ShellConfig shell = make_shell(0.05, surf);
    EnergySpec spec;
    spec.variant = HelfrichSpec{1.0, 0.0, 0.0, 0.0};
    spec.epsilon = 0.05;
    std::string dens = density_csv(g, surf, spec, shell);
    CHECK(dens.rfind("node_i,node_j,W,H,K,sqrt_a,m_plus,m_minus\n", 0) == 0);
    rows = 0;
    for (char c : dens) rows += c == '\n';
    CHECK(rows == 1 + 64);
}

TEST_CASE("OBJ export round-trips vertices exactly and emits quad faces") {
    SurfacePreset torus = torus_preset(2.0, 0.5);
    ParamGrid g = grid_for(torus, 6, 5);
    Field3 pts = sample(torus, g);
    std::string obj = obj_export(pts, g);
    Field3 back = obj_import_points(obj);
    REQUIRE(back.size() == pts.size());
    // %.17g prints a shortest exact representation, so the round trip is bitwise.
    for (std::size_t k = 0; k < pts.size(); ++k) CHECK(norm(back[k] - pts[k]) == 0.0);

    std::size_t faces = 0;
    for (std::size_t pos = 0; (pos = obj.find("\nf ", pos)) != std::string::npos; ++pos) ++faces;
    CHECK(faces == 6 * 5);  // doubly periodic: every cell wraps

    SurfacePreset plate = plate_preset();
    ParamGrid gp = grid_for(plate, 4, 4);
    std::string obj_plate = obj_export(sample(plate, gp), gp);
    faces = 0;
    for (std::size_t pos = 0; (pos = obj_plate.find("\nf ", pos)) != std::string::npos; ++pos)
        ++faces;
    CHECK(faces == 3 * 3);

    CHECK_THROWS_AS(obj_export(Field3(3), gp), ShapeError);
    CHECK_THROWS_AS(obj_import_points("v 1.0 nope 2.0\n"), ValidationError);
}

TEST_CASE("reports serialize with a schema version and render deterministically") {
    AdmissibilityReport adm;
    adm.ok = true;
    adm.min_sqrt_a = 1.0;
    json rep = make_report(json{{"admissibility", to_json(adm)}});
    CHECK(rep["schema_version"] == kSchemaVersion);
    CHECK(rep["admissibility"]["ok"] == true);

    std::string r1 = render_report(rep);
    std::string r2 = render_report(make_report(json{{"admissibility", to_json(adm)}}));
    CHECK(r1 == r2);
    CHECK(r1.back() == '\n');

    // Numeric fields survive a parse round trip bit-exactly.
    ConvexityReport conv;
    conv.samples_tested = 10;
    conv.max_violation = -1.2345678901234567e-11;
    conv.passed = true;
    json parsed = json::parse(render_report(make_report(json{{"polyconvexity", to_json(conv)}})));
    CHECK(parsed["polyconvexity"]["max_violation"].get<double>() == conv.max_violation);
}
