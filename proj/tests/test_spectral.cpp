#include "nsvb/oracle.hpp"
#include "nsvb/spectral.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace nsvb;
using namespace nsvb::spectral;

namespace {

std::vector<double> random_samples(int dim, int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> v(ipow(static_cast<std::size_t>(n), dim));
    for (double& x : v) x = U(rng);
    return v;
}

}  // namespace

TEST(Spectral, CoefficientsMatchDirectSums) {
    for (int dim : {1, 2}) {
        const int n = dim == 1 ? 12 : 8;
        const auto s = random_samples(dim, n, 3);
        auto c = coefficients(dim, n, s);
        drop_nyquist(dim, n, c);
        const auto ref = oracle::direct_dft(dim, n, s);
        for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(std::abs(c[i] - ref[i]), 0.0, 1e-14);
    }
}

TEST(Spectral, SamplesInvertCoefficients) {
    const auto s = random_samples(2, 8, 4);
    const auto back = samples(2, 8, coefficients(2, 8, s));
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(back[i], s[i], 1e-14);
}

TEST(Spectral, ResizeKeepsBandLimitedValues) {
    // cos x + 0.5 sin 2x sampled on 8 points, padded to 16.
    std::vector<double> s(8);
    for (int i = 0; i < 8; ++i) s[i] = std::cos(2 * kPi * i / 8) + 0.5 * std::sin(4 * kPi * i / 8);
    const auto fine = samples(1, 16, resize(1, 8, coefficients(1, 8, s), 16));
    for (int i = 0; i < 16; ++i)
        EXPECT_NEAR(fine[i], std::cos(2 * kPi * i / 16) + 0.5 * std::sin(4 * kPi * i / 16), 1e-14);
}

TEST(Spectral, PaddedSize) {
    for (auto [n, K] : {std::pair{16, 4}, {32, 8}, {64, 16}, {8, 2}}) {
        const int p = padded_size(n, K);
        EXPECT_EQ(p % 2, 0);
        EXPECT_GE(2 * p, 3 * n);
        EXPECT_GT(p, n / 2 + 2 * K);
    }
}

TEST(Spectral, BasisLayout) {
    const Basis b(2, 3, 2.0 * kPi, 12);
    EXPECT_EQ(b.size(), 49u);
    for (std::size_t m = 0; m < b.size(); ++m) {
        const auto k = b.mode(m), km = b.mode(b.mirror(m));
        for (int a = 0; a < 2; ++a) EXPECT_EQ(k[a], -km[a]);
    }
    EXPECT_NEAR(b.volume(), 4.0 * kPi * kPi, 1e-12);
}

TEST(Spectral, ProjectInvertsSynthesize) {
    const Basis b(1, 4, 2.0 * kPi, 16);
    std::mt19937 rng(5);
    std::normal_distribution<double> N;
    std::vector<cplx> c(b.size());
    for (std::size_t m = 0; m < b.size(); ++m) {
        if (b.mirror(m) < m) continue;
        c[m] = b.mirror(m) == m ? cplx(N(rng), 0.0) : cplx(N(rng), N(rng));
        c[b.mirror(m)] = std::conj(c[m]);
    }
    const auto back = b.project(b.synthesize(c, 16), 16);
    for (std::size_t m = 0; m < b.size(); ++m) EXPECT_NEAR(std::abs(back[m] - c[m]), 0.0, 1e-13);
}

TEST(Spectral, RejectsBadInput) {
    EXPECT_THROW(Basis(4, 2, 1.0, 8), InputError);
    std::vector<cplx> a(8), b(7);
    EXPECT_THROW(fft_forward(1, 8, a, b), InputError);
}
