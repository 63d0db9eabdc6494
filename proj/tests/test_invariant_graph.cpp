#include <doctest.h>

#include <cmath>

#include "skewgraph/invariant_graph.hpp"

using namespace skewgraph;

namespace {

// flanking fixed points of the perturbed pinch map, by bisection on the closed
// form  c d^2 = eta exp(-(d/w)^2)
double flank_offset(double c, double eta, double w) {
    auto h = [&](double d) { return eta * std::exp(-(d / w) * (d / w)) - c * d * d; };
    double a = 1e-8, b = 0.3;
    for (int i = 0; i < 200; ++i) {
        double m = 0.5 * (a + b);
        if (h(m) > 0) a = m; else b = m;
    }
    return 0.5 * (a + b);
}

} // namespace

TEST_CASE("pullback at the degenerate point is plain map iteration") {
    auto sys = SkewSystem::reference();
    auto a = pullback_fiber(sys, 0, BasePoint::baker(0.0, 0.0), 200);
    // oracle: iterate the pinch map on the band endpoints directly
    double lo = 0.08, hi = 0.42;
    for (int k = 0; k < 200; ++k) {
        double dl = lo - 0.18, dh = hi - 0.18;
        lo = lo - 2.0 * dl * dl * dl;
        hi = hi - 2.0 * dh * dh * dh;
    }
    CHECK(a.lo == doctest::Approx(lo).epsilon(1e-13));
    CHECK(a.hi == doctest::Approx(hi).epsilon(1e-13));
    // the pinch is neutral, so the collapse is only polynomial in depth
    CHECK(a.width() > 0.05);
    CHECK(a.width() < 0.08);
}

TEST_CASE("perturbed fibres over the all-zero branch converge to the flank gap") {
    auto sys = SkewSystem::reference(BaseKind::Baker, 0.3);
    double oracle = 2.0 * flank_offset(2.0, 0.3, 0.04);
    auto a = pullback_fiber(sys, 0, BasePoint::baker(0.0, 0.0), 400);
    CHECK(std::abs(a.width() - oracle) < 1e-6);
    CHECK(a.is_bone);
    // the bone straddles the repeller and contains both flanks
    CHECK(a.lo == doctest::Approx(0.18 - oracle / 2).epsilon(1e-6));
    CHECK(a.hi == doctest::Approx(0.18 + oracle / 2).epsilon(1e-6));
}

TEST_CASE("pullback enclosures are nested in depth") {
    auto sys = SkewSystem::reference();
    BaseMeasureSampler sampler{31, 0};
    for (int i = 0; i < 25; ++i) {
        BasePoint p = sampler.sample(BaseKind::Baker, static_cast<std::uint64_t>(i));
        auto a50 = pullback_fiber(sys, 0, p, 50);
        auto a100 = pullback_fiber(sys, 0, p, 100);
        CHECK(a100.lo >= a50.lo - 1e-12);
        CHECK(a100.hi <= a50.hi + 1e-12);
        // the half-depth enclosure tracked inside one sweep agrees
        CHECK(a100.half_lo == doctest::Approx(a50.lo).epsilon(1e-13));
        CHECK(a100.half_hi == doctest::Approx(a50.hi).epsilon(1e-13));
    }
}

TEST_CASE("graph value sits at the lower enclosure edge and is Cauchy in depth") {
    auto sys = SkewSystem::reference();
    BaseMeasureSampler sampler{37, 0};
    for (int i = 0; i < 10; ++i) {
        BasePoint p = sampler.sample(BaseKind::Baker, static_cast<std::uint64_t>(i));
        auto a = pullback_fiber(sys, 0, p, 800);
        CHECK(graph_value(sys, 0, p, 800) == a.lo);
        CHECK(std::abs(graph_value(sys, 0, p, 800) - graph_value(sys, 0, p, 1600)) <= 1e-8);
        CHECK(sys.band(0).iv.strictly_inside(a.lo));
    }
}

TEST_CASE("degenerate-point graph value approaches the neutral fixed point") {
    auto sys = SkewSystem::reference();
    double g = graph_value(sys, 0, BasePoint::baker(0.0, 0.0), 40000);
    CHECK(std::abs(g - 0.18) < 3e-3);  // (2 c depth)^(-1/2) collapse rate
}

TEST_CASE("invariance residual vanishes at the fixed point and decays in depth") {
    // geometric convergence at the perturbed flank makes the residual collapse;
    // the unperturbed pinch is neutral, so there it only decays polynomially
    auto pert = SkewSystem::reference(BaseKind::Baker, 0.3);
    CHECK(invariance_residual_at(pert, 0, BasePoint::baker(0.0, 0.0), 400) <= 1e-12);

    auto sys = SkewSystem::reference();
    double r50 = invariance_residual_at(sys, 0, BasePoint::baker(0.0, 0.0), 50);
    double r5000 = invariance_residual_at(sys, 0, BasePoint::baker(0.0, 0.0), 5000);
    CHECK(r5000 < r50);

    BaseMeasureSampler sampler{41, 0};
    std::vector<BasePoint> pts;
    for (int i = 0; i < 100; ++i)
        pts.push_back(sampler.sample(BaseKind::Baker, static_cast<std::uint64_t>(i)));
    auto r100 = invariance_residual(sys, pts, 100);
    auto r400 = invariance_residual(sys, pts, 400);
    CHECK(r400.max_residual <= r100.max_residual + 1e-12);
    CHECK(r400.max_residual < 1e-6);
}

TEST_CASE("residuals computed through the stepped point agree with two pullbacks") {
    auto sys = SkewSystem::reference();
    BaseMeasureSampler sampler{43, 0};
    for (int i = 0; i < 10; ++i) {
        BasePoint p = sampler.sample(BaseKind::Baker, static_cast<std::uint64_t>(i));
        double direct = std::abs(sys.fiber(0, p.t, graph_value(sys, 0, p, 120), 0) -
                                 graph_value(sys, 0, baker_step(p), 120));
        CHECK(invariance_residual_at(sys, 0, p, 120) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("multi-graph sampling: two point fibres almost surely") {
    auto sys = SkewSystem::reference();
    BaseMeasureSampler sampler{47, 0};
    auto mg = sample_multigraph(sys, sampler, 300, 400, 1e-4);
    REQUIRE(mg.cardinality_histogram.size() == 3);
    double frac2 = static_cast<double>(mg.cardinality_histogram[2]) / 300.0;
    CHECK(frac2 >= 0.99);
    CHECK(mg.max_residual < 1e-5);
}

TEST_CASE("multi-graph sampling over bone sites flags every perturbed fibre") {
    auto sys = SkewSystem::reference(BaseKind::Baker, 0.3);
    BaseMeasureSampler sampler{53, 0};
    auto mg = sample_multigraph(sys, sampler, 100, 400, 1e-4, 1, true);
    double oracle = 2.0 * flank_offset(2.0, 0.3, 0.04);
    for (const auto& rec : mg.records) {
        CHECK(rec.fibers[0].is_bone);
        CHECK(std::abs(rec.fibers[0].width() - oracle) < 1e-6);
        CHECK_FALSE(rec.fibers[0].is_point(1e-4));
    }
    // while random fibres stay points
    auto rnd = sample_multigraph(sys, sampler, 300, 400, 1e-4);
    CHECK(rnd.bone_fraction < 0.01);
}

TEST_CASE("usc probe: zero radius at a dyadic point gives zero excess") {
    auto sys = SkewSystem::reference();
    auto rep = usc_probe(sys, 0, BasePoint::baker(0.0, 0.0), 0.0, 20, 200);
    CHECK(rep.max_excess <= 0.0);
    CHECK(rep.eps <= 1e-12);
}

TEST_CASE("usc probe at generic points: one-sided enclosure") {
    auto sys = SkewSystem::reference();
    BaseMeasureSampler sampler{59, 0};
    BasePoint p = sampler.sample(BaseKind::Baker, 3);
    auto rep = usc_probe(sys, 0, p, 1e-3, 30, 400);
    CHECK(rep.max_excess <= 1e-9);
    CHECK(rep.max_diam_violation <= 1e-9);
}

TEST_CASE("usc probe at a bone: neighbours have strictly thinner fibres") {
    auto sys = SkewSystem::reference(BaseKind::Baker, 0.3);
    // dyadic bone site: the probe jitters into generic nearby points
    auto rep = usc_probe(sys, 0, BasePoint::baker(0.0, 0.0), 1e-3, 30, 400);
    CHECK(rep.center.is_bone);
    CHECK(rep.max_neighbor_width < rep.center.width());
    CHECK(rep.max_excess <= 1e-9);
}

TEST_CASE("circle points cannot be pulled back") {
    auto sys = SkewSystem::reference();
    CHECK_THROWS_AS(pullback_fiber(sys, 0, BasePoint::circle(0.3), 10), std::invalid_argument);
}

TEST_CASE("solenoid coordinates pull back exactly like their baker originals") {
    auto sys = SkewSystem::reference(BaseKind::Baker, 0.3);
    BaseMeasureSampler sampler{127, 0};
    for (int i = 0; i < 10; ++i) {
        BasePoint p = sampler.sample(BaseKind::Baker, static_cast<std::uint64_t>(i));
        BasePoint sol = baker_to_solenoid(p, 300);
        auto a = pullback_fiber(sys, 0, p, 300);
        auto b = pullback_fiber(sys, 0, sol, 300);
        CHECK(a.lo == b.lo);
        CHECK(a.hi == b.hi);
    }
}

TEST_CASE("sampled solenoid points are valid pullback inputs") {
    auto sys = SkewSystem::reference();
    BaseMeasureSampler sampler{131, 0};
    BasePoint p = sampler.sample(BaseKind::Solenoid, 0, 120);
    auto a = pullback_fiber(sys, 0, p, 120);
    CHECK(a.width() < sys.band(0).iv.width());
    CHECK_THROWS_AS(pullback_fiber(sys, 0, p, 121), std::invalid_argument);
}
