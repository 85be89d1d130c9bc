#include "nsvb/harness/oracles.hpp"
#include "nsvb/oracle.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace nsvb;
using namespace nsvb::harness;

TEST(Oracles, RegistryIsComplete) {
    EXPECT_TRUE(registry_completeness(oracle_registry()).complete());
    const auto& req = required_oracles();
    EXPECT_EQ(std::set<std::string>(req.begin(), req.end()).size(), req.size());
}

TEST(Oracles, DroppedCaseIsReportedMissing) {
    auto reg = oracle_registry();
    reg.erase(std::remove_if(reg.begin(), reg.end(),
                             [](const OracleCase& c) { return c.name == "fluid.acoustic_frequency"; }),
              reg.end());
    const auto chk = registry_completeness(reg);
    ASSERT_EQ(chk.missing.size(), 1u);
    EXPECT_EQ(chk.missing[0], "fluid.acoustic_frequency");
}

TEST(Oracles, DeskLimits) {
    SimConfig c = desk_config();
    EXPECT_NO_THROW(check_desk_limits(c));
    c.K = 4;
    c.grid.n_x = 16;
    try {
        check_desk_limits(c);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "K");
    }
}

TEST(Oracles, DefaultSuitePasses) {
    const auto rep = run_oracle_suite(desk_config());
    EXPECT_EQ(rep.outcomes.size(), oracle_registry().size());
    for (const auto& o : rep.outcomes) EXPECT_TRUE(o.passed) << o.name << ": " << o.detail;
    EXPECT_TRUE(rep.passed());
}

TEST(Oracles, EpsSignFlipIsCaught) {
    SimConfig c = desk_config();
    c.fluid.inject_eps_sign_flip = true;
    EXPECT_FALSE(run_oracle("fluid.momentum_rhs_dense_galerkin", c).passed);
}

TEST(Oracles, UnknownNameIsInputError) {
    EXPECT_THROW(run_oracle("no.such_case", desk_config()), InputError);
}

TEST(Oracles, IntegratorAccuracyBothDirections) {
    const oracle::OdeRhs rhs = [](double t, const std::vector<double>& y, std::vector<double>& dy) {
        dy = {y[1], -y[0] + 0.0 * t};
    };
    const auto fwd = oracle::integrate(rhs, {0.0, 1.0}, 0.0, 3.0, {1e-12, 1e-14});
    EXPECT_NEAR(fwd[0], std::sin(3.0), 1e-10);
    EXPECT_NEAR(fwd[1], std::cos(3.0), 1e-10);
    const auto back = oracle::integrate(rhs, fwd, 3.0, 0.0, {1e-12, 1e-14});
    EXPECT_NEAR(back[0], 0.0, 1e-10);
    EXPECT_NEAR(back[1], 1.0, 1e-10);
}
