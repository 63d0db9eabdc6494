#include <doctest.h>

#include <cmath>

#include "skewgraph/thermodynamics.hpp"

using namespace skewgraph;

TEST_CASE("transfer matrix structure: branch counts and exact eigenvalues") {
    auto L = TransferDiscretization::build(Potential::constant(0.0), 256);
    for (int k = 0; k < 256; k += 17)
        CHECK(L.column_weight_sum(k) == doctest::Approx(4.0).epsilon(1e-15));

    auto p0 = transfer_pressure(Potential::constant(0.0), {256, 512, 1024});
    CHECK(std::abs(p0.value - std::log(4.0)) < 1e-12);
    CHECK(p0.spectral_gap_ratio < 0.9);

    auto pl = transfer_pressure(Potential::neg_log_deriv(), {256, 512, 1024});
    CHECK(std::abs(pl.value) < 1e-9);
    // equilibrium density is the uniform one, cell mass 1/N
    for (double d : pl.density)
        CHECK(std::abs(d * static_cast<double>(pl.density.size()) - 1.0) < 1e-6);
}

TEST_CASE("constant shifts move the pressure exactly") {
    auto base = transfer_pressure(Potential::constant(0.0), {512});
    auto shifted = transfer_pressure(Potential::constant(0.37), {512});
    CHECK(shifted.value - base.value == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("cosine potential: resolution-stable pressure inside the coarse bounds") {
    auto tr = transfer_pressure(Potential::cosine(0.5), {256, 512, 1024});
    CHECK(tr.value > std::log(4.0) - 0.5);
    CHECK(tr.value < std::log(4.0) + 0.5);
    REQUIRE(!tr.cauchy_ladder.empty());
    CHECK(tr.cauchy_ladder.back() < 1e-4);  // 512 vs 1024
    CHECK(tr.spectral_gap_ratio > 0.0);
    CHECK(tr.spectral_gap_ratio < 1.0);
}

TEST_CASE("separated-set estimator recovers log 4 and exact constant shifts") {
    auto s0 = pressure_separated(Potential::constant(0.0), {1.0 / 64}, 8);
    CHECK(std::abs(s0.value - std::log(4.0)) < 1e-9);
    auto sc = pressure_separated(Potential::constant(-std::log(4.0)), {1.0 / 64}, 8);
    CHECK(std::abs(sc.value) < 1e-9);
    // counts follow the 4^{n-1}/eps law
    for (const auto& row : s0.diagnostics)
        CHECK(row.count == static_cast<std::int64_t>(std::llround(std::pow(4.0, row.n - 1) * 64)));
}

TEST_CASE("separated-set and transfer estimates agree for the cosine potential") {
    auto tr = transfer_pressure(Potential::cosine(0.5), {512, 1024});
    auto sep = pressure_separated(Potential::cosine(0.5), {0.25, 1.0 / 64}, 8);
    CHECK(std::abs(tr.value - sep.value) < 0.1);
}

TEST_CASE("epsilon below the grid budget is a configuration error") {
    CHECK_THROWS_AS(pressure_separated(Potential::constant(0.0), {1e-9}, 4, 1000),
                    std::invalid_argument);
}

TEST_CASE("torus-extension estimator matches the circle values") {
    auto s0 = pressure_separated_baker(Potential::constant(0.0), {1.0 / 64}, 6);
    CHECK(std::abs(s0.value - std::log(4.0)) < 1e-9);
    auto sl = pressure_separated_baker(Potential::neg_log_deriv(), {1.0 / 64}, 6);
    CHECK(std::abs(sl.value) < 1e-9);
}

TEST_CASE("variational inequality against exact periodic orbits") {
    auto p0 = transfer_pressure(Potential::constant(0.0), {512});
    auto v0 = variational_check(Potential::constant(0.0), p0.value, 6);
    CHECK(v0.satisfied);
    CHECK(v0.max_cycle_average == doctest::Approx(0.0));

    auto pc = transfer_pressure(Potential::cosine(1.0), {512, 1024});
    auto vc = variational_check(Potential::cosine(1.0), pc.value, 6);
    CHECK(vc.satisfied);
    // the fixed point t = 0 realizes the cycle average 1
    CHECK(vc.max_cycle_average == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pc.value >= 1.0);

    auto pl = transfer_pressure(Potential::neg_log_deriv(), {512});
    auto vl = variational_check(Potential::neg_log_deriv(), pl.value, 6);
    CHECK(vl.satisfied);
    CHECK(vl.max_cycle_average == doctest::Approx(-std::log(4.0)));
    CHECK(vl.floor_satisfied);
}

TEST_CASE("lifted potentials") {
    auto sys = SkewSystem::reference();
    auto coord = Potential::fiber_dependent([](double, double x) { return x; });
    auto psi = lift_potential(sys, 0, coord, 40000);
    CHECK(std::abs(psi(BasePoint::baker(0.0, 0.0)) - 0.18) < 3e-3);

    auto cosine = Potential::cosine(0.5);
    auto psi_base = lift_potential(sys, 0, cosine, 100);
    BaseMeasureSampler sampler{107, 0};
    for (int i = 0; i < 20; ++i) {
        BasePoint p = sampler.sample(BaseKind::Baker, static_cast<std::uint64_t>(i));
        CHECK(psi_base(p) == cosine.eval(p.t));  // base potentials lift through t only
        double v = lift_potential(sys, 0, coord, 400)(p);
        CHECK(v > 0.08);
        CHECK(v < 0.42);
    }
}

TEST_CASE("pressure lifts across the factor map within tolerance") {
    for (const auto& phi : {Potential::constant(0.0), Potential::neg_log_deriv(),
                            Potential::cosine(0.5)}) {
        auto rep = lifted_pressure_check(phi, 512, {1.0 / 64}, 6);
        CHECK(rep.difference < 0.15);
    }
}

TEST_CASE("equilibrium pushforward sits on the graph with unit mass") {
    auto sys = SkewSystem::reference();
    auto tr = transfer_pressure(Potential::neg_log_deriv(), {256, 512});
    auto push = pushforward_equilibrium(sys, 0, tr.density, BaseMeasureSampler{109, 0}, 500, 400);
    CHECK(push.measure.total_weight() == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& a : push.measure.atoms) {
        CHECK(a.x > 0.08);
        CHECK(a.x < 0.42);
    }
    auto gm = graph_measure(sys, 0, BaseMeasureSampler{113, 0}, 500, 400);
    CHECK(std::abs(push.mean_x.mean - gm.mean_x.mean) < 0.005);
}
