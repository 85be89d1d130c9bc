#include "nsvb/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace nsvb::kernel {

BreakageKernel uniform_volume_kernel(double nu, double r_min, double r_max) {
    BreakageKernel k;
    k.nu = nu;
    k.r_min = r_min;
    k.r_max = r_max;
    k.label = "uniform_volume";
    k.law = [](double r, double rs) { return r < rs ? 6.0 * r * r / (rs * rs * rs) : 0.0; };
    return k;
}

BreakageKernel scaled_kernel(const BreakageKernel& base, double factor) {
    BreakageKernel k = base;
    k.label = base.label + "*" + std::to_string(factor);
    k.law = [law = base.law, factor](double r, double rs) { return factor * law(r, rs); };
    return k;
}

BreakageKernel truncated_kernel(const BreakageKernel& base, double fraction) {
    BreakageKernel k = base;
    k.label = base.label + "|truncated";
    k.law = [law = base.law, fraction](double r, double rs) { return r < fraction * rs ? law(r, rs) : 0.0; };
    return k;
}

double eval_kernel(const BreakageKernel& k, double r_daughter, double r_parent) {
    if (!std::isfinite(r_daughter) || !std::isfinite(r_parent))
        throw InputError("eval_kernel: non-finite radius");
    if (r_daughter <= 0.0 || r_parent <= 0.0) throw InputError("eval_kernel: radii must be positive");
    if (r_daughter >= r_parent) return 0.0;
    return k.law(r_daughter, r_parent);
}

GaussLegendre::GaussLegendre(int n) : nodes(n), weights(n) {
    // Newton iteration on P_n from the Chebyshev initial guess.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

KernelValidationReport validate_hypotheses(const BreakageKernel& k, int n_quad, double tolerance) {
    if (n_quad < 8) throw InputError("validate_hypotheses: n_quad must be >= 8");
    KernelValidationReport rep;
    rep.n_quad = n_quad;
    rep.tolerance = tolerance;

    const int n_parent = 32;
    const GaussLegendre gl(n_quad);
    const double c = std::cbrt(2.0);

    auto safe = [&rep](double v) {
        if (!std::isfinite(v)) {
            rep.finite = false;
            return 0.0;
        }
        return v;
    };
    auto law = [&](double r, double rs) { return safe(k.law(r, rs)); };

    for (int ip = 0; ip < n_parent; ++ip) {
        const double rs = k.r_min + (k.r_max - k.r_min) * (ip + 0.5) / n_parent;

        // I: pointwise sampling on (0, 1.5 r*].
        for (int i = 1; i <= n_quad; ++i) {
            const double r = 1.5 * rs * i / n_quad;
            const double v = law(r, rs);
            if (v < 0.0) {
                rep.nonnegative = false;
                rep.residual_I = std::max(rep.residual_I, -v);
            }
            if (r >= rs && v != 0.0) {
                rep.support = false;
                rep.residual_I = std::max(rep.residual_I, std::abs(v));
            }
        }

        // III: both halves integrate to one.
        const double split = rs / c;
        const double lower = gl.integrate([&](double r) { return law(r, rs); }, 0.0, split);
        const double upper = gl.integrate([&](double r) { return law(r, rs); }, split, rs);
        rep.residual_III = std::max({rep.residual_III, std::abs(lower - 1.0), std::abs(upper - 1.0)});

        // II: mirror identity under R(r) = (r*^3 - r^3)^{1/3}, orientation corrected.
        static constexpr double fr[] = {0.0, 0.15, 0.4, 0.7, 1.0};
        auto R = [rs](double r) { return std::cbrt(rs * rs * rs - r * r * r); };
        for (std::size_t a = 0; a < std::size(fr); ++a) {
            for (std::size_t b = a + 1; b < std::size(fr); ++b) {
                const double lo = fr[a] * split, hi = fr[b] * split;
                const double lhs = gl.integrate([&](double r) { return law(r, rs); }, lo, hi);
                const double rhs = gl.integrate([&](double r) { return law(r, rs); }, R(hi), R(lo));
                rep.residual_II = std::max(rep.residual_II, std::abs(lhs - rhs));
            }
        }
    }
    if (!rep.finite) {
        rep.residual_I = std::max(rep.residual_I, 1.0);
    }
    rep.passed = rep.finite && rep.nonnegative && rep.support && rep.residual_I < tolerance &&
                 rep.residual_II < tolerance && rep.residual_III < tolerance;
    return rep;
}

void check_matches_grid(const BreakageKernel& k, const phase::PhaseGrid& g) {
    const double tol = 1e-12 * std::max(1.0, g.r_max);
    if (std::abs(k.r_min - g.r_min) > tol) throw ConfigError("r_min", "kernel radius interval differs from grid");
    if (std::abs(k.r_max - g.r_max) > tol) throw ConfigError("r_max", "kernel radius interval differs from grid");
}

GainMatrix::GainMatrix(const BreakageKernel& k, const phase::PhaseGrid& g, GainRule rule)
    : n_(g.n_r), w_(static_cast<std::size_t>(g.n_r) * g.n_r, 0.0) {
    const double dr = g.dr();
    auto W = [this](int i, int j) -> double& { return w_[static_cast<std::size_t>(i) * n_ + j]; };
    for (int i = 0; i < n_; ++i) {
        const double ri = g.radius(i);
        // Half cell [r_i, r_i + dr/2], midpoint r_i + dr/4.
        const double b_half = k.law(ri, ri + 0.25 * dr) * 0.5 * dr;
        if (i + 1 < n_) {
            W(i, i) += 0.75 * b_half;
            W(i, i + 1) += 0.25 * b_half;
        } else {
            W(i, i) += b_half;
        }
        for (int j = i + 1; j < n_; ++j) W(i, j) += k.law(ri, g.radius(j)) * dr;
    }
    if (rule == GainRule::mass_conservative) {
        for (int j = 0; j < n_; ++j) {
            double m = 0.0;
            for (int i = 0; i < n_; ++i) m += std::pow(g.radius(i), 3) * W(i, j);
            if (m > 0.0) {
                const double s = std::pow(g.radius(j), 3) / m;
                for (int i = 0; i < n_; ++i) W(i, j) *= s;
            }
        }
    }
}

void GainMatrix::apply(std::span<const double> in, std::span<double> out) const {
    const std::size_t cols = in.size() / static_cast<std::size_t>(n_);
    parallel_for(cols, [&](std::size_t b, std::size_t e) {
        for (std::size_t c = b; c < e; ++c) {
            const double* f = &in[c * n_];
            double* g = &out[c * n_];
            for (int i = 0; i < n_; ++i) {
                double s = 0.0;
                const double* row = &w_[static_cast<std::size_t>(i) * n_];
                for (int j = i; j < n_; ++j) s += row[j] * f[j];
                g[i] = s;
            }
        }
    });
}

std::vector<double> apply_Q(const phase::Distribution& f, const BreakageKernel& k, GainRule rule) {
    check_matches_grid(k, f.grid);
    std::vector<double> q(f.values.size(), 0.0);
    if (k.nu == 0.0) return q;
    const GainMatrix gain(k, f.grid, rule);
    gain.apply(f.values, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = k.nu * (q[i] - f.values[i]);
    return q;
}

double q_moment_residual(const phase::Distribution& f, const BreakageKernel& k, double p, GainRule rule) {
    const auto qv = apply_Q(f, k, rule);
    // Integrate r^3 |xi|^p Q(f) through the signed values; velocity_moment is linear.
    phase::Distribution pos(f.grid), neg(f.grid);
    for (std::size_t i = 0; i < qv.size(); ++i) {
        pos.values[i] = std::max(qv[i], 0.0);
        neg.values[i] = std::max(-qv[i], 0.0);
    }
    return phase::velocity_moment(pos, p) - phase::velocity_moment(neg, p);
}

ParentMassResult parent_mass_residual(const BreakageKernel& k, double r_parent, int n_quad) {
    ParentMassResult res;
    const double rs3 = r_parent * r_parent * r_parent;
    if (r_parent <= k.r_min * (1.0 + 1e-12)) {
        res.residual = 1.0;
        res.degenerate = true;
        return res;
    }
    const GaussLegendre gl(n_quad);
    const double m = gl.integrate([&](double r) { return r * r * r * k.law(r, r_parent); }, 0.0, r_parent);
    res.residual = std::abs(m - rs3) / rs3;
    return res;
}

}  // namespace nsvb::kernel
