#include "nsvb/oracle.hpp"
#include "nsvb/phase.hpp"

#include <gtest/gtest.h>

using namespace nsvb;
using namespace nsvb::phase;

namespace {

PhaseGrid grid2d() {
    PhaseGrid g;
    g.dim = 2;
    g.n_x = 4;
    g.n_xi = 6;
    g.xi_max = 3.0;
    g.n_r = 3;
    return g;
}

Distribution filled(const PhaseGrid& g) {
    Distribution f(g);
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = 1.0 + std::sin(0.37 * i) * std::sin(0.37 * i);
    return f;
}

}  // namespace

TEST(Phase, GridValidation) {
    PhaseGrid g;
    EXPECT_NO_THROW(g.validate());
    g.r_min = -0.1;
    EXPECT_THROW(g.validate(), InputError);
    g = PhaseGrid{};
    g.r_max = g.r_min;
    EXPECT_THROW(g.validate(), InputError);
    g = PhaseGrid{};
    g.dim = 4;
    EXPECT_THROW(g.validate(), InputError);
}

TEST(Phase, IndexingRoundTrips) {
    const auto g = grid2d();
    for (std::size_t i = 0; i < g.velocity_cells(); ++i) EXPECT_EQ(g.flatten(g.unflatten(i, g.n_xi), g.n_xi), i);
    EXPECT_DOUBLE_EQ(g.velocity(0)[0], -3.0 + 0.5);
    EXPECT_DOUBLE_EQ(g.position(5)[1], g.dx());
}

TEST(Phase, DistributionValidation) {
    Distribution f(grid2d());
    EXPECT_NO_THROW(f.validate());
    f.values[3] = -1e-30;
    EXPECT_THROW(f.validate(), InputError);
    f.values[3] = std::nan("");
    EXPECT_THROW(f.validate(), InputError);
}

TEST(Phase, MomentsMatchNestedLoops) {
    const auto f = filled(grid2d());
    const auto n = moment0(f), nr = oracle::nested_moment0(f);
    for (std::size_t i = 0; i < n.size(); ++i) EXPECT_NEAR(n[i], nr[i], 1e-13 * nr[i]);
    const auto j = moment1(f), jr = oracle::nested_moment1(f);
    for (std::size_t i = 0; i < j.data.size(); ++i) EXPECT_NEAR(j.data[i], jr.data[i], 1e-12);
    EXPECT_NEAR(spray_mass(f), oracle::nested_spray_mass(f), 1e-12 * spray_mass(f));
    EXPECT_NEAR(kinetic_energy_moment(f), oracle::nested_kinetic_energy(f), 1e-12 * kinetic_energy_moment(f));
}

TEST(Phase, UnitWeightsReproduceMoments) {
    const auto f = filled(grid2d());
    const std::vector<double> ones(f.grid.n_r, 1.0);
    const auto w = weighted_moments(f, ones);
    const auto m = compute_moments(f);
    for (std::size_t i = 0; i < m.n_field.size(); ++i) EXPECT_DOUBLE_EQ(w.n_field[i], m.n_field[i]);
    for (std::size_t i = 0; i < m.j_field.data.size(); ++i) EXPECT_DOUBLE_EQ(w.j_field.data[i], m.j_field.data[i]);
}

TEST(Phase, EvenDensityHasNoMomentum) {
    PhaseGrid g;
    g.n_x = 4;
    Distribution f(g);
    for (std::size_t ix = 0; ix < g.spatial_cells(); ++ix)
        for (std::size_t iv = 0; iv < g.velocity_cells(); ++iv)
            for (int ir = 0; ir < g.n_r; ++ir) f.at(ix, iv, ir) = std::exp(-g.velocity(iv)[0] * g.velocity(iv)[0]);
    EXPECT_NEAR(spray_momentum(f)[0], 0.0, 1e-13);
    EXPECT_NEAR(velocity_moment(f, 0.0), spray_mass(f), 1e-13);
}
