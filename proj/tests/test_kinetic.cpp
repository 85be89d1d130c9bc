#include "nsvb/kinetic.hpp"

#include <gtest/gtest.h>

using namespace nsvb;
using namespace nsvb::kinetic;

namespace {

PhaseGrid small_grid() {
    PhaseGrid g;
    g.n_x = 8;
    g.n_xi = 16;
    g.xi_max = 4.0;
    g.n_r = 4;
    return g;
}

Distribution bump_f(const PhaseGrid& g) {
    Distribution f(g);
    for (std::size_t ix = 0; ix < g.spatial_cells(); ++ix)
        for (std::size_t iv = 0; iv < g.velocity_cells(); ++iv) {
            const double xi = g.velocity(iv)[0];
            const double h = std::abs(xi) < 2.0 ? std::pow(std::cos(0.25 * kPi * xi), 2) : 0.0;
            for (int ir = 0; ir < g.n_r; ++ir) f.at(ix, iv, ir) = h * (1.0 + 0.5 * std::cos(g.position(ix)[0]));
        }
    return f;
}

}  // namespace

TEST(Kinetic, WholeCellTransportIsAShift) {
    const auto g = small_grid();
    const auto f = bump_f(g);
    Distribution h = f;
    // tau chosen so that xi * tau is an integer number of cells for xi = 0.25.
    const double tau = g.dx() / 0.25;
    free_transport(h, tau);
    const std::size_t iv = static_cast<std::size_t>(8);  // xi = 0.25
    ASSERT_DOUBLE_EQ(g.velocity(iv)[0], 0.25);
    for (std::size_t ix = 0; ix < g.spatial_cells(); ++ix)
        EXPECT_NEAR(h.at(ix, iv, 0), f.at((ix + g.spatial_cells() - 1) % g.spatial_cells(), iv, 0), 1e-14);
}

TEST(Kinetic, AdvectionKeepsPositivity) {
    const auto g = small_grid();
    VectorField u(1, g.spatial_cells());
    for (std::size_t i = 0; i < g.spatial_cells(); ++i) u(0, i) = 0.5 * std::sin(g.position(i)[0]);
    auto f = bump_f(g);
    AdvectStats st;
    for (int s = 0; s < 20; ++s) f = advect_step(f, u, 0.05, {}, &st);
    EXPECT_GE(f.min_value(), 0.0);
    EXPECT_GT(st.slices, 0);
}

TEST(Kinetic, SupportGuard) {
    const auto g = small_grid();
    Distribution f(g);
    f.at(0, 0, 0) = 1.0;  // outermost xi cell
    EXPECT_THROW(check_support(f, {}), SupportViolation);
    EXPECT_NO_THROW(check_support(bump_f(g), {}));
}

TEST(Kinetic, NoFragmentationWithoutRate) {
    const auto g = small_grid();
    const auto f = bump_f(g);
    const auto h = fragmentation_substep(f, kernel::uniform_volume_kernel(0.0, g.r_min, g.r_max), 0.1);
    for (std::size_t i = 0; i < f.values.size(); ++i) EXPECT_DOUBLE_EQ(h.values[i], f.values[i]);
}

TEST(Kinetic, DragPowerSign) {
    const auto g = small_grid();
    const auto f = bump_f(g);
    const VectorField rest(1, g.spatial_cells(), 0.0);
    EXPECT_LT(drag_power(f, rest), 0.0);  // droplets slow down in a gas at rest
}

TEST(Kinetic, LipschitzProbeUndefinedForEqualFields) {
    const auto g = small_grid();
    const VectorField u(1, g.spatial_cells(), 0.1);
    const auto p = lipschitz_probe(bump_f(g), u, u, 0.05, 3);
    EXPECT_TRUE(p.undefined);
    EXPECT_EQ(p.numerator, 0.0);
}

TEST(Kinetic, BacktraceRejectsBadArguments) {
    const auto g = small_grid();
    const VectorField u(1, g.spatial_cells(), 0.0);
    EXPECT_THROW(backtrace(g, u, 0.0, 0.1), InputError);
    EXPECT_THROW(backtrace(g, u, 0.5, -0.1), InputError);
    EXPECT_THROW(backtrace(g, VectorField(1, 3), 0.5, 0.1), InputError);
}
