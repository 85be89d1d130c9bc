#include "nsvb/coupling.hpp"
#include "nsvb/harness/scenario.hpp"

#include <gtest/gtest.h>

using namespace nsvb;
using namespace nsvb::harness;

TEST(Coupling, GridMismatchIsRejected) {
    const SimConfig cfg = builtin_scenario("equilibrium");
    const auto s = initial_state(cfg);
    auto g = s.f.grid;
    g.n_x *= 2;
    EXPECT_THROW(coupling::make_coupled_state(s.fluid, phase::Distribution(g), cfg.basis()), ConfigError);
}

TEST(Coupling, EquilibriumKeepsEnergy) {
    const SimConfig cfg = builtin_scenario("equilibrium");
    const auto b = cfg.basis();
    const auto p = cfg.sim_params();
    auto s = initial_state(cfg);
    const double E0 = coupling::energy(s, p, b);
    for (int k = 0; k < 20; ++k) coupling::coupled_step(s, p, b, cfg.dt);
    EXPECT_NEAR(coupling::energy(s, p, b), E0, 1e-12 * E0);
    EXPECT_EQ(s.step, 20);
}

// The sequential split is first order: it keeps both masses but exchanges
// momentum only up to O(dt).
TEST(Coupling, SequentialSplittingIsFirstOrderInMomentum) {
    SimConfig cfg = builtin_scenario("drag_relaxation");
    cfg.splitting = "sequential";
    const auto b = cfg.basis();
    const auto p = cfg.sim_params();
    EXPECT_EQ(p.splitting, coupling::Splitting::sequential);
    double drift[2];
    for (int level = 0; level < 2; ++level) {
        auto s = initial_state(cfg);
        const double dt = cfg.dt / (1 << level);
        const auto P0 = coupling::total_momentum(s, b);
        const double m0 = fluid::fluid_mass(s.fluid.rho, b), q0 = phase::spray_mass(s.f);
        for (int k = 0; k < 20 << level; ++k) coupling::coupled_step(s, p, b, dt);
        drift[level] = std::abs(coupling::total_momentum(s, b)[0] - P0[0]);
        EXPECT_NEAR(fluid::fluid_mass(s.fluid.rho, b), m0, 1e-13 * m0);
        EXPECT_NEAR(phase::spray_mass(s.f), q0, 1e-10 * q0);
    }
    EXPECT_GT(drift[0] / drift[1], 1.6);
    EXPECT_LT(drift[0] / drift[1], 2.5);
}

TEST(Coupling, FailureNamesTheSubstep) {
    SimConfig cfg = builtin_scenario("equilibrium");
    cfg.initial.rho_amplitude = 0.3;
    cfg.initial.u_amplitude = 0.5;
    auto p = cfg.sim_params();
    p.fluid.max_iter = 1;
    auto s = initial_state(cfg);
    s.step = 7;
    try {
        coupling::coupled_step(s, p, cfg.basis(), 0.5);
        FAIL();
    } catch (const SteppingError& e) {
        EXPECT_EQ(e.substep(), "fluid");
        EXPECT_EQ(e.step(), 7);
    }
}

TEST(Coupling, DragShellWeightsTendToOne) {
    phase::PhaseGrid g;
    const auto w = coupling::drag_shell_weights(g, 1e-9);
    for (double v : w) EXPECT_NEAR(v, 1.0, 1e-8);
    const auto big = coupling::drag_shell_weights(g, 10.0);
    for (int i = 0; i < g.n_r; ++i) {
        const double r2 = g.radius(i) * g.radius(i);
        EXPECT_NEAR(big[i], r2 * (1.0 - std::exp(-10.0 / r2)) / 10.0, 1e-15);
    }
}

TEST(Coupling, LedgerResidual) {
    coupling::EnergyLedger led;
    led.start(0.0, 2.0);
    led.t.push_back(0.1);
    led.E.push_back(1.5);
    led.drag = 0.5;
    led.s.push_back(0.0);
    EXPECT_NEAR(coupling::energy_inequality_check(led, 0.1), 0.0, 1e-15);
    EXPECT_TRUE(coupling::energy_inequality_passes(led, 1e-6));
}
