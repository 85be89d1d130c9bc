#include "nsvb/fluid.hpp"
#include "nsvb/oracle.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace nsvb;
using namespace nsvb::fluid;

namespace {

std::vector<double> wavy(int n, double amp) {
    std::vector<double> rho(n);
    for (int i = 0; i < n; ++i) {
        const double x = 2 * kPi * i / n;
        rho[i] = 1.0 + amp * std::cos(x) + 0.5 * amp * std::sin(2 * x + 0.3);
    }
    return rho;
}

Coeffs some_velocity(const spectral::Basis& b, double amp) {
    std::vector<double> u(b.n_x());
    for (int i = 0; i < b.n_x(); ++i) u[i] = amp * std::sin(2 * kPi * i / b.n_x() + 0.4);
    Coeffs c = Coeffs::Zero(static_cast<Eigen::Index>(b.size()), 1);
    const auto p = b.project(u, b.n_x());
    for (std::size_t m = 0; m < b.size(); ++m) c(static_cast<Eigen::Index>(m), 0) = p[m];
    return c;
}

}  // namespace

TEST(Fluid, ParameterValidation) {
    FluidParams p;
    EXPECT_DOUBLE_EQ(p.beta_value(), 5.0);
    p.gamma = 6.0;
    EXPECT_DOUBLE_EQ(p.beta_value(), 7.0);
    p.gamma = 1.0;
    try {
        p.validate();
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "gamma");
        EXPECT_NE(std::string(e.what()).find("gamma > 1"), std::string::npos);
    }
    p = FluidParams{};
    p.mu = 0.0;
    EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Fluid, MassMatrixRejectsNonPositiveDensity) {
    const spectral::Basis b(1, 2, 2 * kPi, 8);
    auto rho = wavy(8, 0.2);
    rho[3] = 0.0;
    EXPECT_THROW(mass_matrix_build(rho, b), PositivityError);
}

TEST(Fluid, MassMatrixEigenvalueBound) {
    const spectral::Basis b(1, 3, 2 * kPi, 16);
    const auto mm = mass_matrix_build(wavy(16, 0.3), b);
    EXPECT_GE(mm.min_eigenvalue, mm.min_rho - 1e-10);
    EXPECT_LE(mm.max_eigenvalue, 1.0 + 0.3 + 0.15 + 1e-10);
}

TEST(Fluid, ContinuityConservesMass) {
    const spectral::Basis b(1, 4, 2 * kPi, 16);
    FluidParams p;
    p.eps = 0.01;
    const auto rho = wavy(16, 0.2);
    const auto out = continuity_advance(b, p, rho, some_velocity(b, 0.5), 0.05);
    EXPECT_NEAR(fluid_mass(out, b), fluid_mass(rho, b), 1e-13 * fluid_mass(rho, b));
    EXPECT_THROW(continuity_advance(b, p, rho, some_velocity(b, 0.5), 0.0), InputError);
}

TEST(Fluid, EpsSignFlipBreaksAgreementWithDenseAssembly) {
    const spectral::Basis b(1, 3, 2 * kPi, 16);
    FluidParams p;
    p.eps = 0.05;
    auto st = make_state(b, wavy(16, 0.2));
    st.u = some_velocity(b, 0.4);
    const phase::ScalarField n(16, 0.2);
    phase::VectorField j(1, 16, 0.05);
    const auto ref = oracle::dense_momentum_rhs(st.rho, st.u, n, j, p, b);
    EXPECT_LT((momentum_rhs(st, n, j, p, b) - ref).cwiseAbs().maxCoeff(), 1e-12);
    p.inject_eps_sign_flip = true;
    EXPECT_GT((momentum_rhs(st, n, j, p, b) - ref).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(Fluid, MomentumStepAtRestStaysAtRest) {
    const spectral::Basis b(1, 2, 2 * kPi, 8);
    const auto st = make_state(b, std::vector<double>(8, 1.0));
    const auto r = momentum_step(st, DragSource::none(b), FluidParams{}, b, 0.1);
    EXPECT_LT(r.state.u.cwiseAbs().maxCoeff(), 1e-15);
    for (double v : r.state.rho) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Fluid, PicardFailureIsReported) {
    const spectral::Basis b(1, 4, 2 * kPi, 16);
    FluidParams p;
    p.max_iter = 2;
    auto st = make_state(b, wavy(16, 0.3));
    st.u = some_velocity(b, 0.5);
    EXPECT_THROW(momentum_step(st, DragSource::none(b), p, b, 0.2), ConvergenceError);
}

TEST(Fluid, DissipationRatesOfSingleMode) {
    const spectral::Basis b(1, 2, 2 * kPi, 8);
    FluidParams p;
    p.mu = 0.3;
    p.lambda = 0.1;
    auto st = make_state(b, std::vector<double>(8, 1.0));
    std::vector<double> u(8);
    for (int i = 0; i < 8; ++i) u[i] = std::sin(2 * kPi * i / 8);
    const auto pu = b.project(u, 8);
    for (std::size_t m = 0; m < b.size(); ++m) st.u(static_cast<Eigen::Index>(m), 0) = pu[m];
    const auto d = dissipation_rates(st.rho, st.u, p, b);
    // int cos^2 over the period is pi.
    EXPECT_NEAR(d.viscous_mu, 0.3 * kPi, 1e-12);
    EXPECT_NEAR(d.viscous_lambda, 0.1 * kPi, 1e-12);
    EXPECT_NEAR(kinetic_energy(st, b), 0.5 * kPi, 1e-12);
}

TEST(Fluid, DensityBoundsOnConstantHistory) {
    const spectral::Basis b(1, 2, 2 * kPi, 8);
    const std::vector<FluidState> h(3, make_state(b, std::vector<double>(8, 1.2)));
    const auto rep = density_bounds_check(h, b);
    EXPECT_TRUE(rep.passed);
    EXPECT_DOUBLE_EQ(rep.rho_lower, 1.2);
    EXPECT_NEAR(rep.lower_margin, 0.0, 1e-15);
}
