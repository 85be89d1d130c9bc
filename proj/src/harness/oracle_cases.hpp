// Shared helpers for the oracle case files.
#pragma once

#include "nsvb/harness/oracles.hpp"
#include "nsvb/oracle.hpp"

#include <cstdarg>
#include <cstdio>
#include <random>

namespace nsvb::harness::cases {

std::vector<OracleCase> kernel_cases();
std::vector<OracleCase> phase_cases();
std::vector<OracleCase> kinetic_cases();
std::vector<OracleCase> fluid_cases();
std::vector<OracleCase> coupling_cases();
std::vector<OracleCase> harness_cases();

inline std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

/// Passes when value <= threshold (NaN fails).
inline OracleOutcome at_most(double value, double threshold, std::string detail = {}) {
    OracleOutcome o;
    o.value = value;
    o.threshold = threshold;
    o.comparison = "<=";
    o.passed = value <= threshold;
    o.detail = std::move(detail);
    return o;
}

/// Passes when value >= threshold.
inline OracleOutcome at_least(double value, double threshold, std::string detail = {}) {
    OracleOutcome o = at_most(value, threshold, std::move(detail));
    o.comparison = ">=";
    o.passed = value >= threshold;
    return o;
}

inline phase::PhaseGrid make_grid(int dim, int n_x, int n_xi, double xi_max, int n_r, double a, double b) {
    phase::PhaseGrid g;
    g.dim = dim;
    g.n_x = n_x;
    g.n_xi = n_xi;
    g.xi_max = xi_max;
    g.n_r = n_r;
    g.r_min = a;
    g.r_max = b;
    return g;
}

/// cos^2 bump of half-width w centred at c, zero outside.
inline double bump(double s, double c, double w) {
    const double z = (s - c) / w;
    return std::abs(z) < 1.0 ? std::pow(std::cos(0.5 * kPi * z), 2) : 0.0;
}

/// Smooth, compactly supported density: an xi bump (centre xc on axis 0) times
/// a radius bump times a positive x modulation with random phases.
inline phase::Distribution smooth_distribution(const phase::PhaseGrid& g, std::mt19937_64& rng, double xc = 0.0,
                                               double xw = 0.0) {
    std::uniform_real_distribution<double> U(0.0, 2.0 * kPi);
    const double ph0 = U(rng), ph1 = U(rng);
    if (xw <= 0.0) xw = 0.5 * g.xi_max;
    const double rc = 0.5 * (g.r_min + g.r_max), rw = 0.45 * (g.r_max - g.r_min);
    phase::Distribution f(g);
    for (std::size_t ix = 0; ix < g.spatial_cells(); ++ix) {
        const auto x = g.position(ix);
        double mx = 1.0;
        for (int a = 0; a < g.dim; ++a) mx *= 1.0 + 0.3 * std::cos(x[a] + (a ? ph1 : ph0));
        for (std::size_t iv = 0; iv < g.velocity_cells(); ++iv) {
            const auto xi = g.velocity(iv);
            double hv = 1.0;
            for (int a = 0; a < g.dim; ++a) hv *= bump(xi[a], a == 0 ? xc : 0.0, xw);
            for (int ir = 0; ir < g.n_r; ++ir) f.at(ix, iv, ir) = mx * hv * (0.1 + bump(g.radius(ir), rc, rw));
        }
    }
    return f;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

/// Relative L2 distance |a - b| / |b|.
inline double rel_l2(std::span<const double> a, std::span<const double> b) {
    double e = 0.0, r = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        e += (a[i] - b[i]) * (a[i] - b[i]);
        r += b[i] * b[i];
    }
    return r > 0.0 ? std::sqrt(e / r) : std::sqrt(e);
}

/// Index of the zero mode in a basis.
inline std::size_t zero_mode(const spectral::Basis& b) {
    for (std::size_t m = 0; m < b.size(); ++m)
        if (b.mode(m) == std::array<int, 3>{0, 0, 0}) return m;
    return 0;
}

/// Band-limited random density 1 + sum of a few low modes with amplitude `amp`.
inline std::vector<double> random_density(int dim, int n, double amp, std::mt19937_64& rng, int max_mode = 2) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const std::size_t cells = ipow(static_cast<std::size_t>(n), dim);
    std::vector<double> rho(cells, 1.0);
    const double dx = 2.0 * kPi / n;
    for (int k = 1; k <= max_mode; ++k)
        for (int a = 0; a < dim; ++a) {
            const double c = amp * U(rng) / k, s = amp * U(rng) / k;
            for (std::size_t i = 0; i < cells; ++i) {
                std::size_t r = i;
                int idx = 0;
                for (int b = dim - 1; b >= 0; --b) {
                    if (b == a) idx = static_cast<int>(r % n);
                    r /= n;
                }
                rho[i] += c * std::cos(k * idx * dx) + s * std::sin(k * idx * dx);
            }
        }
    return rho;
}

/// Random velocity coefficients of a real field with amplitude `amp`.
inline fluid::Coeffs random_velocity(const spectral::Basis& b, double amp, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0.0, amp);
    fluid::Coeffs u = fluid::Coeffs::Zero(static_cast<Eigen::Index>(b.size()), b.dim());
    for (int c = 0; c < b.dim(); ++c)
        for (std::size_t m = 0; m < b.size(); ++m) {
            const std::size_t mm = b.mirror(m);
            if (mm < m) continue;
            if (mm == m) {
                u(static_cast<Eigen::Index>(m), c) = N(rng);
            } else {
                const spectral::cplx v(N(rng), N(rng));
                u(static_cast<Eigen::Index>(m), c) = v;
                u(static_cast<Eigen::Index>(mm), c) = std::conj(v);
            }
        }
    return u;
}

}  // namespace nsvb::harness::cases
