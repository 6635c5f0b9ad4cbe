#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "polarity/exchange.hpp"
#include "support/fixtures.hpp"

using namespace polarity;

namespace {

StepperConfig config(double dt, double t_end) {
    StepperConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    return cfg;
}

}  // namespace

TEST(ExchangeStep, SymmetricStationaryStateIsFixed) {
    for (std::size_t n : {200u, 1000u}) {
        const auto g = build_grid(n);
        for (double M : {1.0, 2.0}) {
            const ExchangeState s = exchange_state_from(symmetric_state(M, Model::exchange, g));
            const ExchangeState next = exchange_step(s, 1e-2);
            EXPECT_LE(l1_distance(next.interior, s.interior), g->dx() * g->dx() * 1e-2);
            EXPECT_NEAR(next.mu_left, s.mu_left, 1e-13);
            EXPECT_NEAR(next.mu_right, s.mu_right, 1e-13);
        }
    }
}

TEST(ExchangeStep, SymmetryPreserved) {
    const auto g = build_grid(1000);
    const Field shape = Field::sample(g, [](double x) { return 1.0 + 0.5 * std::cos(5.0 * x); });
    ExchangeState s = exchange_state_with_total_mass(shape, 2.0);
    for (int k = 0; k < 10; ++k) s = exchange_step(s, 1e-2);
    EXPECT_NEAR(s.mu_left, s.mu_right, 1e-13);
    for (std::size_t i = 0; i < g->size(); ++i) EXPECT_NEAR(s.interior[i], s.interior[g->size() - 1 - i], 1e-13);
}

TEST(ExchangeStep, ConservesTotalMass) {
    const auto g = build_grid(1000);
    const ExchangeState s{fixtures::steep_profile(g), 0.3, 0.05};
    const ExchangeState next = exchange_step(s, 1e-2);
    EXPECT_NEAR(next.total_mass(), s.total_mass(), 1e-12 * s.total_mass());
}

TEST(ExchangeStep, BoundaryKineticsSatisfiedExactly) {
    const auto g = build_grid(1000);
    ExchangeState s{fixtures::shifted_gaussian(g, 1.5, 0.6), 0.1, 0.9};
    const double dt = 1e-2;
    for (int k = 0; k < 50; ++k) {
        const ExchangeState next = exchange_step(s, dt);
        EXPECT_LE(std::abs((next.mu_left - s.mu_left) / dt - (next.interior.front() - next.mu_left)), 1e-10);
        EXPECT_LE(std::abs((next.mu_right - s.mu_right) / dt - (next.interior.back() - next.mu_right)), 1e-10);
        s = next;
    }
}

TEST(ExchangeState, TotalMassScaling) {
    const auto g = build_grid(400);
    const ExchangeState s = exchange_state_with_total_mass(fixtures::steep_profile(g), 2.0);
    EXPECT_NEAR(s.total_mass(), 2.0, 1e-13);
    EXPECT_EQ(s.mu_left, s.interior.front());
    EXPECT_EQ(s.mu_right, s.interior.back());
    EXPECT_THROW(exchange_state_from(symmetric_state(1.0, Model::direct, g)), std::invalid_argument);
}

TEST(ExchangeSimulate, SteepSupercriticalDataStayBounded) {
    const auto g = build_grid(1000);
    const ExchangeState s0 = exchange_state_with_total_mass(fixtures::steep_profile(g), 2.0);
    const auto out = exchange_simulate(s0, config(1e-2, 20.0));
    ASSERT_EQ(out.status, SimStatus::completed) << out.message;
    const double bound = 10.0 * 2.0 / g->dx();
    for (const auto& r : out.trajectory) {
        EXPECT_LT(r.sup_norm, bound);
        EXPECT_LE(std::abs(r.mu_left - r.mu_right), 2.0 + 1e-10);
        EXPECT_NEAR(r.total_mass, 2.0, 1e-10 * 2.0);
    }
}

TEST(ExchangeSimulate, UnitMassConvergesToSymmetricState) {
    const auto g = build_grid(1000);
    const Field target = symmetric_state(1.0, Model::exchange, g).field;
    // two symmetric starts and one asymmetric; the odd mode decays at a rate near 0.3
    const std::vector<Field> shapes = {fixtures::gamma_shaped(g, 0.0, 1.0),
                                       Field::sample(g, [](double x) { return std::exp(-4.0 * x * x); }),
                                       fixtures::shifted_gaussian(g, 1.0, 0.8)};
    for (const Field& shape : shapes) {
        const auto out = exchange_simulate(exchange_state_with_total_mass(shape, 1.0), config(1e-2, 40.0));
        ASSERT_EQ(out.status, SimStatus::completed);
        EXPECT_LE(l1_distance(out.final_state, target), 1e-4);
        EXPECT_NEAR(out.mu_left, target.front(), 1e-4);
        EXPECT_NEAR(out.mu_right, target.back(), 1e-4);
    }
}

TEST(ExchangeSimulate, MassThreeSettlesOnAsymmetricState) {
    const auto g = build_grid(1000);
    const auto alpha = solve_alpha(3.0, Model::exchange);
    ASSERT_TRUE(alpha.has_value());
    const auto out = exchange_simulate(exchange_state_with_total_mass(fixtures::shifted_gaussian(g, 1.0, 0.8), 3.0),
                                       config(1e-2, 40.0));
    ASSERT_EQ(out.status, SimStatus::completed);
    const double a_final = out.mu_left - out.mu_right;
    EXPECT_NEAR(std::abs(a_final), *alpha, 1e-3);
    const Field target = asymmetric_profile(a_final > 0 ? *alpha : -*alpha, g);
    EXPECT_LE(l1_distance(out.final_state, target), 1e-3);
}

TEST(ExchangeSimulate, ReflectionEquivariance) {
    const auto g = build_grid(1000);
    const ExchangeState s0{fixtures::shifted_gaussian(g, 1.2, 0.5), 0.4, 0.1};
    StepperConfig cfg = config(1e-2, 3.0);
    cfg.snapshot_times = {1.0, 3.0};
    const auto a = exchange_simulate(s0, cfg);
    const auto b = exchange_simulate(s0.reflected(), cfg);
    ASSERT_EQ(a.snapshots.size(), 2u);
    for (std::size_t k = 0; k < 2; ++k) {
        EXPECT_LE(l1_distance(a.snapshots[k].field, b.snapshots[k].field.reflected()), 1e-10);
    }
    EXPECT_NEAR(a.mu_left, b.mu_right, 1e-12);
    EXPECT_NEAR(a.mu_right, b.mu_left, 1e-12);
}

TEST(ExchangeSimulate, RejectsNegativeBoundaryMass) {
    const auto g = build_grid(100);
    const ExchangeState bad{fixtures::shifted_gaussian(g, 1.0), -0.1, 0.2};
    EXPECT_THROW(exchange_simulate(bad, config(1e-2, 1.0)), std::invalid_argument);
}
