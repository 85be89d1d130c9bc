#include "nsvb/kernel.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nsvb;
using namespace nsvb::kernel;

namespace {

phase::PhaseGrid radius_grid(int n_r, double a, double b) {
    phase::PhaseGrid g;
    g.dim = 1;
    g.n_x = 2;
    g.n_xi = 4;
    g.xi_max = 2.0;
    g.n_r = n_r;
    g.r_min = a;
    g.r_max = b;
    return g;
}

// Smooth bump in r on [0.5, 0.9], times a Gaussian-like bump in xi.
phase::Distribution smooth_f(const phase::PhaseGrid& g) {
    phase::Distribution f(g);
    for (std::size_t ix = 0; ix < g.spatial_cells(); ++ix)
        for (std::size_t iv = 0; iv < g.velocity_cells(); ++iv) {
            const double xi = g.velocity(iv)[0];
            const double hv = std::pow(std::cos(0.25 * kPi * xi), 2);
            for (int ir = 0; ir < g.n_r; ++ir) {
                const double r = g.radius(ir);
                const double s = (r - 0.7) / 0.2;
                const double hr = std::abs(s) < 1.0 ? std::pow(std::cos(0.5 * kPi * s), 4) : 0.0;
                f.at(ix, iv, ir) = hv * hr * (1.0 + 0.3 * ix);
            }
        }
    return f;
}

}  // namespace

TEST(Kernel, UniformVolumeValues) {
    const auto k = uniform_volume_kernel(1.0, 0.5, 1.0);
    EXPECT_DOUBLE_EQ(eval_kernel(k, 0.5, 1.0), 1.5);  // 6 * 0.25 / 1
    EXPECT_EQ(eval_kernel(k, 1.0, 1.0), 0.0);
    EXPECT_EQ(eval_kernel(k, 2.0, 1.0), 0.0);
    EXPECT_THROW(eval_kernel(k, std::nan(""), 1.0), InputError);
    EXPECT_THROW(eval_kernel(k, 0.5, INFINITY), InputError);
}

TEST(Kernel, GaussLegendreIntegratesPolynomialsExactly) {
    const GaussLegendre gl(12);
    EXPECT_NEAR(gl.integrate([](double x) { return std::pow(x, 21); }, 0.0, 1.0), 1.0 / 22.0, 1e-15);
    EXPECT_NEAR(gl.integrate([](double x) { return std::cos(x); }, 0.0, kPi / 2), 1.0, 1e-14);
}

TEST(Kernel, UniformVolumePassesHypotheses) {
    const auto rep = validate_hypotheses(uniform_volume_kernel(1.0, 0.5, 1.0), 256);
    EXPECT_TRUE(rep.passed);
    EXPECT_LT(rep.residual_I, 1e-8);
    EXPECT_LT(rep.residual_II, 1e-8);
    EXPECT_LT(rep.residual_III, 1e-8);
    EXPECT_EQ(rep.n_quad, 256);
}

TEST(Kernel, DefectiveKernelsFail) {
    BreakageKernel zero = uniform_volume_kernel(1.0, 0.5, 1.0);
    zero.law = [](double, double) { return 0.0; };
    const auto rz = validate_hypotheses(zero, 64);
    EXPECT_FALSE(rz.passed);
    EXPECT_NEAR(rz.residual_III, 1.0, 1e-15);

    BreakageKernel wrong_side = zero;
    wrong_side.law = [](double r, double rs) { return r > rs ? 1.0 : 0.0; };
    const auto rw = validate_hypotheses(wrong_side, 64);
    EXPECT_FALSE(rw.passed);
    EXPECT_FALSE(rw.support);
    EXPECT_GT(rw.residual_I, 0.0);

    const auto rt = validate_hypotheses(truncated_kernel(uniform_volume_kernel(1.0, 0.5, 1.0), 0.9), 256);
    EXPECT_FALSE(rt.passed);

    BreakageKernel nan_law = zero;
    nan_law.law = [](double r, double rs) { return r < rs ? std::nan("") : 0.0; };
    const auto rn = validate_hypotheses(nan_law, 16);
    EXPECT_FALSE(rn.passed);
    EXPECT_FALSE(rn.finite);
    EXPECT_TRUE(std::isfinite(rn.residual_I) && std::isfinite(rn.residual_II) && std::isfinite(rn.residual_III));

    EXPECT_THROW(validate_hypotheses(zero, 4), InputError);
}

TEST(Kernel, ParentMassResidual) {
    const auto k = uniform_volume_kernel(1.0, 0.01, 1.0);
    EXPECT_LT(parent_mass_residual(k, 1.0, 512).residual, 1e-10);
    const auto deg = parent_mass_residual(k, 0.01, 64);
    EXPECT_TRUE(deg.degenerate);
    EXPECT_DOUBLE_EQ(deg.residual, 1.0);
    EXPECT_NEAR(parent_mass_residual(scaled_kernel(k, 0.5), 1.0, 512).residual, 0.5, 1e-12);
}

TEST(Kernel, QIsZeroForZeroInputsAndRate) {
    const auto g = radius_grid(16, 0.5, 1.0);
    const phase::Distribution zero(g);
    for (double v : apply_Q(zero, uniform_volume_kernel(1.0, 0.5, 1.0))) EXPECT_EQ(v, 0.0);
    const auto f = smooth_f(g);
    for (double v : apply_Q(f, uniform_volume_kernel(0.0, 0.5, 1.0))) EXPECT_EQ(v, 0.0);
    EXPECT_THROW(apply_Q(f, uniform_volume_kernel(1.0, 0.4, 1.0)), ConfigError);
}

TEST(Kernel, QIsLinearAndCommutesWithXiTranslation) {
    const auto g = radius_grid(16, 0.5, 1.0);
    const auto k = uniform_volume_kernel(0.7, 0.5, 1.0);
    auto f = smooth_f(g);
    phase::Distribution h(g);
    for (std::size_t i = 0; i < h.values.size(); ++i) h.values[i] = std::sin(1.0 + i) * std::sin(1.0 + i);
    phase::Distribution comb(g);
    for (std::size_t i = 0; i < comb.values.size(); ++i) comb.values[i] = 2.0 * f.values[i] + 0.5 * h.values[i];
    const auto qf = apply_Q(f, k), qh = apply_Q(h, k), qc = apply_Q(comb, k);
    for (std::size_t i = 0; i < qc.size(); ++i) EXPECT_NEAR(qc[i], 2.0 * qf[i] + 0.5 * qh[i], 1e-14);

    // Shift by one xi cell (periodic relabeling of xi columns).
    phase::Distribution shifted(g);
    const std::size_t nv = g.velocity_cells();
    for (std::size_t ix = 0; ix < g.spatial_cells(); ++ix)
        for (std::size_t iv = 0; iv < nv; ++iv)
            for (int ir = 0; ir < g.n_r; ++ir) shifted.at(ix, (iv + 1) % nv, ir) = f.at(ix, iv, ir);
    const auto qs = apply_Q(shifted, k);
    for (std::size_t ix = 0; ix < g.spatial_cells(); ++ix)
        for (std::size_t iv = 0; iv < nv; ++iv)
            for (int ir = 0; ir < g.n_r; ++ir)
                EXPECT_EQ(qs[g.index(ix, (iv + 1) % nv, ir)], qf[g.index(ix, iv, ir)]);
}

TEST(Kernel, QMomentResidualConvergesAtSecondOrder) {
    const auto k = uniform_volume_kernel(1.0, 0.01, 1.0);
    for (double p : {1.0, 2.0, 3.0}) {
        std::vector<double> res;
        for (int n : {16, 32, 64}) {
            const auto g = radius_grid(n, 0.01, 1.0);
            res.push_back(std::abs(q_moment_residual(smooth_f(g), k, p)));
        }
        EXPECT_GT(res[0] / res[1], 3.5) << "p=" << p;
        EXPECT_GT(res[1] / res[2], 3.5) << "p=" << p;
    }
}

TEST(Kernel, TruncatedKernelResidualStaysAway) {
    const auto k = truncated_kernel(uniform_volume_kernel(1.0, 0.01, 1.0), 0.9);
    double last = 0.0;
    for (int n : {16, 32, 64}) {
        const auto g = radius_grid(n, 0.01, 1.0);
        last = std::abs(q_moment_residual(smooth_f(g), k, 2.0));
    }
    EXPECT_GT(last, 1e-3);
}

TEST(Kernel, MassConservativeGainPreservesR3Mass) {
    const auto g = radius_grid(24, 0.5, 1.0);
    const GainMatrix w(uniform_volume_kernel(1.0, 0.5, 1.0), g, GainRule::mass_conservative);
    for (int j = 0; j < w.size(); ++j) {
        double m = 0.0;
        for (int i = 0; i < w.size(); ++i) {
            EXPECT_GE(w(i, j), 0.0);
            m += std::pow(g.radius(i), 3) * w(i, j);
        }
        EXPECT_NEAR(m, std::pow(g.radius(j), 3), 1e-14);
    }
}
