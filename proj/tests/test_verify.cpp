#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <variant>

#include "shellvar/verify.hpp"

using namespace shellvar;

namespace {

EnergySpec helfrich(double eps = 0.05, HelfrichSpec h = {1.0, 0.3, 0.4, 0.2}) {
    EnergySpec s;
    s.variant = h;
    s.epsilon = eps;
    return s;
}

EnergySpec poly_one_term(double eps = 0.05) {
    PolyFamilySpec p;
    p.terms.push_back({1.0, 1.0, 2.0, 0.2, 0.0, 0.0});
    p.gamma.terms.push_back(GammaLogBarrier{0.5});
    EnergySpec s;
    s.variant = std::move(p);
    s.epsilon = eps;
    return s;
}

EnergySpec poly_three_terms(double eps = 0.05) {
    PolyFamilySpec p;
    p.terms.push_back({1.0, 0.7, 2.0, 0.1, 0.0, 0.0});
    p.terms.push_back({0.5, 0.5, 3.0, 0.25, 0.02, -0.02});
    p.terms.push_back({0.2, 0.9, 4.0, 0.0, 0.0, 0.0});
    p.gamma.terms.push_back(GammaMarginPower{-1, 2.0, 0.4});
    p.gamma.terms.push_back(GammaMarginPower{+1, 1.5, 0.4});
    p.gamma.terms.push_back(GammaQuadOverLin{0.3});
    EnergySpec s;
    s.variant = std::move(p);
    s.epsilon = eps;
    return s;
}

EnergySpec gamma_only(GammaPrimitive prim, double eps = 0.05) {
    PolyFamilySpec p;
    p.terms.push_back({1.0, 1.0, 2.0, 0.1, 0.0, 0.0});
    p.gamma.terms.push_back(std::move(prim));
    EnergySpec s;
    s.variant = std::move(p);
    s.epsilon = eps;
    return s;
}

}  // namespace

TEST_CASE("polyconvexity probe passes for every convex spec") {
    for (const EnergySpec& spec :
         {helfrich(), poly_one_term(), poly_three_terms(),
          gamma_only(GammaAffine{0.2, 1.0, -0.5, 0.3}),
          gamma_only(GammaMarginPower{-1, 3.0, 1.0}), gamma_only(GammaMarginPower{+1, 1.0, 2.0}),
          gamma_only(GammaQuadOverLin{1.0}), gamma_only(GammaLogBarrier{1.0})}) {
        ConvexityReport r = polyconvexity_probe(spec, 1000, 42);
        CHECK(r.passed);
        CHECK(r.samples_tested == 1000);
        CHECK(r.violations.empty());
    }
}

TEST_CASE("polyconvexity probe detects a planted concave gamma") {
    ProbeHooks hooks;
    hooks.gamma_override = [](double a, double, double) { return -a * a; };
    ConvexityReport r = polyconvexity_probe(poly_one_term(), 1000, 42, &hooks);
    CHECK(!r.passed);
    CHECK(!r.violations.empty());
    CHECK(r.max_violation > kConvexityTol);
    // Soundness: every recorded violation re-evaluates as a violation.
    for (const auto& v : r.violations) CHECK(recheck_violation(poly_one_term(), v, &hooks));
}

TEST_CASE("polyconvexity probe is deterministic in the seed") {
    ConvexityReport a = polyconvexity_probe(helfrich(), 500, 7);
    ConvexityReport b = polyconvexity_probe(helfrich(), 500, 7);
    CHECK(a.max_violation == b.max_violation);
    ConvexityReport c = polyconvexity_probe(helfrich(), 500, 8);
    CHECK(a.max_violation != c.max_violation);
}

TEST_CASE("coercivity probe rejects Helfrich and accepts the trace family") {
    CHECK_THROWS_AS(coercivity_probe(helfrich(), 100, 1), UnsupportedSpecError);

    CoercivityReport r = coercivity_probe(poly_three_terms(), 2000, 5);
    CHECK(r.passed);
    CHECK(r.empirical_C > 0.0);
    CHECK(r.samples_tested == 2000);
    CHECK(r.p == 4.0);  // largest exponent among the terms

    CoercivityReport r2 = coercivity_probe(poly_three_terms(), 2000, 5);
    CHECK(r.empirical_C == r2.empirical_C);
}

TEST_CASE("coercivity identity-state ratio is exactly 2 for the unit pair") {
    // At grad psi = identity embedding, grad a3 = 0, spec a1 = b1 = 1, gamma = 2:
    // trace terms are exactly 2 each, |grad psi|^2 = 2, so the ratio is 4/2 = 2.
    SymMat2d identity{1.0, 0.0, 1.0};
    Mat32d a{{Vec3d{1, 0, 0}, Vec3d{0, 1, 0}}};
    NodeForms<double> f = forms_at(a, Mat32d{});
    double t_plus = detail::trace_power_reduced(f.a, identity, 2.0);
    double t_minus = detail::trace_power_reduced(f.a, identity, 2.0);
    CHECK(t_plus == 2.0);
    CHECK(t_minus == 2.0);
    double denom = std::pow(frobenius_sq(a), 1.0);
    CHECK((t_plus + t_minus) / denom == 2.0);
}

TEST_CASE("blowup probe separates barrier-carrying specs from Helfrich") {
    BlowupReport log_spec = blowup_probe(poly_one_term());
    CHECK(log_spec.passed);
    CHECK(log_spec.diverges_plus);
    CHECK(log_spec.diverges_minus);

    BlowupReport h = blowup_probe(helfrich());
    CHECK(!h.passed);
    CHECK(!h.diverges_plus);
    CHECK(!h.diverges_minus);

    // A margin power decays toward the boundary: no divergence either.
    BlowupReport mp = blowup_probe(gamma_only(GammaMarginPower{-1, 2.0, 5.0}));
    CHECK(!mp.passed);

    // Mixed: a log barrier plus bounded primitives still diverges.
    PolyFamilySpec p;
    p.terms.push_back({1.0, 1.0, 2.0, 0.1, 0.0, 0.0});
    p.gamma.terms.push_back(GammaLogBarrier{0.2});
    p.gamma.terms.push_back(GammaMarginPower{-1, 2.0, 3.0});
    p.gamma.terms.push_back(GammaAffine{0.0, 1.0, 0.0, 0.0});
    EnergySpec mixed;
    mixed.variant = std::move(p);
    mixed.epsilon = 0.05;
    CHECK(blowup_probe(mixed).passed);
}

TEST_CASE("blowup probe records margin paths inside N") {
    BlowupReport r = blowup_probe(helfrich(), 30);
    CHECK(r.paths.size() == 2);
    for (const auto& path : r.paths) {
        CHECK(path.margin_values.size() == 30);
        CHECK(path.margin_values.front() == doctest::Approx(0.5));
        CHECK(path.margin_values.back() == doctest::Approx(1e-12).epsilon(1e-6));
        for (std::size_t k = 1; k < path.margin_values.size(); ++k)
            CHECK(path.margin_values[k] < path.margin_values[k - 1]);
    }
    CHECK_THROWS_AS(blowup_probe(helfrich(), 2), ValidationError);
}

TEST_CASE("probe input validation") {
    CHECK_THROWS_AS(polyconvexity_probe(helfrich(), 0, 1), ValidationError);
    EnergySpec bad = poly_one_term();
    std::get<PolyFamilySpec>(bad.variant).terms[0].gamma = 1.0;
    CHECK_THROWS_AS(polyconvexity_probe(bad, 10, 1), ValidationError);
    CHECK_THROWS_AS(coercivity_probe(bad, 10, 1), ValidationError);
}
