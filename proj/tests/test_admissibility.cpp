#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shellvar/admissibility.hpp"
#include "shellvar/surface.hpp"

using namespace shellvar;

TEST_CASE("M membership on the scalar slice") {
    CHECK(m_membership(1.0, 0.0, 0.0));
    CHECK(m_membership(1.0, 0.4, -0.1));
    CHECK(!m_membership(1.0, 1.0, 1.0));    // a - |b| = 0
    CHECK(!m_membership(1.0, 0.6, 0.1));    // a - 2|b| + c = -0.1
    CHECK(!m_membership(0.0, 0.0, 0.0));
    // b enters through its absolute value.
    CHECK(m_membership(1.0, -0.4, 0.0) == m_membership(1.0, 0.4, 0.0));
}

TEST_CASE("orientation margins match the shell jacobian at the faces") {
    double h = -0.7, k = 0.3, sa = 1.4, eps = 0.2;
    double disc = std::sqrt(h * h - k > 0 ? h * h - k : 0.0);
    double k1 = h + disc, k2 = h - disc;
    auto [mp, mm] = orientation_margins(h, k, sa, eps);
    CHECK(mm == doctest::Approx(shell_jacobian(k1, k2, sa, eps)));
    CHECK(mp == doctest::Approx(shell_jacobian(k1, k2, sa, -eps)));
    // Flat surface: both margins equal sqrt_a.
    auto [fp, fm] = orientation_margins(0.0, 0.0, 2.5, 0.3);
    CHECK(fp == doctest::Approx(2.5));
    CHECK(fm == doctest::Approx(2.5));
}

TEST_CASE("make_shell enforces eps kappa < 1") {
    SurfacePreset cap = sphere_cap_preset(1.0, M_PI / 4, 3 * M_PI / 4);
    ParamGrid g = grid_for(cap, 16, 16);
    SurfaceConfiguration surf = make_surface(sample(cap, g), g);
    CHECK_NOTHROW(make_shell(0.5, surf));
    CHECK_THROWS_AS(make_shell(1.5, surf), ValidationError);  // |eps/R| > 1
    CHECK_THROWS_AS(make_shell(0.0, surf), ValidationError);
    CHECK_THROWS_AS(make_shell(-0.1, surf), ValidationError);
}

TEST_CASE("clamp_edges builds gamma0 from edge names") {
    SurfacePreset plate = plate_preset();
    ParamGrid g = grid_for(plate, 5, 7);
    SurfaceConfiguration surf = make_surface(sample(plate, g), g);
    BoundaryConditions bc = clamp_edges({"west", "east"}, surf, g, 2.0);
    CHECK(bc.gamma0.size() == 14);
    CHECK(bc.normal_penalty_weight == 2.0);
    for (std::size_t t = 0; t < bc.gamma0.size(); ++t) {
        CHECK(norm(bc.target_psi[t] - surf.psi[bc.gamma0[t]]) == 0.0);
        CHECK(norm(bc.target_a3[t] - surf.a3[bc.gamma0[t]]) == 0.0);
    }
    CHECK_THROWS_AS(clamp_edges({"up"}, surf, g), ValidationError);

    // Periodic directions contribute no edges.
    SurfacePreset cyl = cylinder_preset(1.0);
    ParamGrid gc = grid_for(cyl, 8, 5);
    SurfaceConfiguration sc = make_surface(sample(cyl, gc), gc);
    CHECK_THROWS_AS(clamp_edges({"west", "east"}, sc, gc), ValidationError);
    CHECK(clamp_edges({"south", "north"}, sc, gc).gamma0.size() == 16);
}

TEST_CASE("check_admissible accepts the reference and reports bc residuals") {
    SurfacePreset cap = sphere_cap_preset(1.0, M_PI / 4, 3 * M_PI / 4);
    ParamGrid g = grid_for(cap, 24, 24);
    SurfaceConfiguration surf = make_surface(sample(cap, g), g);
    ShellConfig shell = make_shell(0.1, surf);
    BoundaryConditions bc = clamp_edges({"west", "east"}, surf, g);

    AdmissibilityReport r = check_admissible(surf, shell, &bc);
    CHECK(r.ok);
    CHECK(r.violating_nodes.empty());
    CHECK(r.min_sqrt_a > 0.0);
    CHECK(r.min_margin_plus > 0.0);
    CHECK(r.min_margin_minus > 0.0);
    CHECK(r.max_eps_kappa == doctest::Approx(0.1).epsilon(1e-2));
    CHECK(r.bc_residual_psi == 0.0);
    CHECK(r.bc_residual_a3 == 0.0);

    // Move one gamma0 node: the bc residual trips, the report flags it.
    Field3 moved = surf.psi;
    moved[bc.gamma0[0]].z += 1e-6;
    AdmissibilityReport r2 = check_admissible(make_surface(moved, g), shell, &bc);
    CHECK(!r2.ok);
    CHECK(r2.bc_residual_psi >= 1e-6 / 2);
}

TEST_CASE("check_admissible flags margin violations nodewise") {
    // A sphere with eps close to the radius: margins hit zero on one face.
    SurfacePreset cap = sphere_cap_preset(1.0, M_PI / 4, 3 * M_PI / 4);
    ParamGrid g = grid_for(cap, 16, 16);
    SurfaceConfiguration surf = make_surface(sample(cap, g), g);
    ShellConfig thin = make_shell(0.1, surf);

    // Admissible w.r.t. the thin shell, but evaluate a deformation whose
    // curvature is too large: shrink the cap by 20x (kappa ~ -20).
    Field3 shrunk = surf.psi;
    for (auto& p : shrunk) p *= 0.05;
    AdmissibilityReport r = check_admissible(make_surface(shrunk, g), thin, nullptr);
    CHECK(!r.ok);
    CHECK(!r.violating_nodes.empty());
    CHECK(r.max_eps_kappa > 1.0);
    // H = -20 on the shrunken sphere: m_minus = (1 + 2*0.1*20 + 0.01*400) sa > 0,
    // m_plus = (1 - 4 + 4) sa > 0 is fine, but eps kappa fails the radius test.
    CHECK(r.min_sqrt_a > 0.0);

    CHECK_THROWS_AS(check_admissible(surf, make_shell(0.1, make_surface(sample(cap, grid_for(cap, 8, 8)), grid_for(cap, 8, 8)))),
                    ShapeError);
}
