// Kinetic oracles: characteristics against an adaptive ODE solve, drag and
// fragmentation substeps against moment ODEs and direct quadrature.
#include "oracle_cases.hpp"

#include "nsvb/kinetic.hpp"

namespace nsvb::harness::cases {

namespace {

using phase::Distribution;
using phase::PhaseGrid;
using phase::VectorField;

double wrapped_distance(double a, double b, double L) {
    double d = std::fmod(std::abs(a - b), L);
    return std::min(d, L - d);
}

// Foot points for constant u against the characteristic ODE integrated backward.
double backtrace_error(double u_value, std::string& detail) {
    const auto g = make_grid(1, 8, 12, 3.0, 4, 0.5, 1.0);
    const VectorField u(1, g.spatial_cells(), u_value);
    const double dt = 0.3;
    double worst = 0.0, worst_closed = 0.0;
    for (double r : {0.5, 0.8, 1.0}) {
        const auto cm = kinetic::backtrace(g, u, r, dt);
        const double r2 = r * r;
        for (std::size_t ix = 0; ix < g.spatial_cells(); ++ix)
            for (std::size_t iv = 0; iv < g.velocity_cells(); ++iv) {
                const double x = g.position(ix)[0], xi = g.velocity(iv)[0];
                auto rhs = [&](double, const std::vector<double>& y, std::vector<double>& dy) {
                    dy.resize(2);
                    dy[0] = y[1];
                    dy[1] = (u_value - y[1]) / r2;
                };
                const auto y = oracle::integrate(rhs, {x, xi}, dt, 0.0, {1e-13, 1e-15});
                const auto& X = cm.x0[ix * g.velocity_cells() + iv];
                const auto& V = cm.xi0[ix * g.velocity_cells() + iv];
                worst = std::max({worst, wrapped_distance(X[0], y[0], g.length), std::abs(V[0] - y[1])});
                worst_closed = std::max(worst_closed, std::abs((V[0] - u_value) - (xi - u_value) * std::exp(dt / r2)));
            }
        worst = std::max(worst, std::abs(cm.factor - std::exp(dt / r2)));
    }
    detail = fmt("ODE foot points %.2e, affine velocity law %.2e", worst, worst_closed);
    return std::max(worst, worst_closed);
}

OracleOutcome backtrace_u0_ode(const SimConfig&) {
    std::string d;
    const double e = backtrace_error(0.0, d);
    return at_most(e, 1e-10, d);
}

OracleOutcome backtrace_constant_u(const SimConfig&) {
    std::string d;
    const double e = backtrace_error(0.4, d);
    return at_most(e, 1e-10, d);
}

Distribution homogeneous_bump(const PhaseGrid& g, double c, double w, double r_c = 0.0, double r_w = 0.0) {
    Distribution f(g);
    for (std::size_t ix = 0; ix < g.spatial_cells(); ++ix)
        for (std::size_t iv = 0; iv < g.velocity_cells(); ++iv)
            for (int ir = 0; ir < g.n_r; ++ir) {
                const double hr = r_w > 0.0 ? bump(g.radius(ir), r_c, r_w) : 1.0;
                f.at(ix, iv, ir) = bump(g.velocity(iv)[0], c, w) * hr;
            }
    return f;
}

OracleOutcome drag_mass_conservation_64(const SimConfig&) {
    const auto g = make_grid(1, 2, 64, 4.0, 64, 0.5, 1.0);
    Distribution f = homogeneous_bump(g, 0.0, 2.0, 0.75, 0.24);
    const VectorField u(1, g.spatial_cells(), 0.0);
    double worst = 0.0, worst_raw = 0.0;
    kinetic::KineticParams raw;
    raw.moment_fix = false;
    for (int s = 0; s < 10; ++s) {
        const double m0 = phase::spray_mass(f);
        Distribution plain = f;
        kinetic::velocity_drag(plain, u, 0.05, raw);
        worst_raw = std::max(worst_raw, std::abs(phase::spray_mass(plain) - m0) / m0);
        kinetic::velocity_drag(f, u, 0.05, {});
        worst = std::max(worst, std::abs(phase::spray_mass(f) - m0) / m0);
    }
    return at_most(worst, 1e-8, fmt("per-step drift %.2e; without the moment fix %.2e", worst, worst_raw));
}

OracleOutcome drag_relaxation_rate(const SimConfig&) {
    const auto g = make_grid(1, 2, 48, 3.0, 8, 0.8, 1.2);
    Distribution f = homogeneous_bump(g, -0.5, 0.8);
    const double U = 0.5, dt = 0.01;
    const VectorField u(1, g.spatial_cells(), U);
    auto shell_means = [&](const Distribution& h) {
        std::vector<double> m(g.n_r);
        for (int ir = 0; ir < g.n_r; ++ir) {
            double m0 = 0.0, m1 = 0.0;
            for (std::size_t iv = 0; iv < g.velocity_cells(); ++iv) {
                m0 += h.at(0, iv, ir);
                m1 += h.at(0, iv, ir) * g.velocity(iv)[0];
            }
            m[ir] = m1 / m0;
        }
        return m;
    };
    const auto start = shell_means(f);
    double worst = 0.0;
    for (int s = 1; s <= 50; ++s) {
        f = kinetic::advect_step(f, u, dt);
        const auto m = shell_means(f);
        for (int ir = 0; ir < g.n_r; ++ir) {
            const double r = g.radius(ir);
            // Scalar ODE m' = (U - m) / r^2 solved exactly.
            const double exact = U + (start[ir] - U) * std::exp(-s * dt / (r * r));
            worst = std::max(worst, std::abs(m[ir] - exact));
        }
    }
    return at_most(worst, 1e-6, "max over shells and steps of |mean velocity - exact relaxation|");
}

OracleOutcome fragmentation_stationary(const SimConfig&) {
    const auto g = make_grid(1, 2, 4, 2.0, 16, 0.5, 1.0);
    const auto k = kernel::uniform_volume_kernel(2.0, g.r_min, g.r_max);
    Distribution f(g);
    const int j = g.n_r - 1;
    for (std::size_t ix = 0; ix < g.spatial_cells(); ++ix)
        for (std::size_t iv = 0; iv < g.velocity_cells(); ++iv) f.at(ix, iv, j) = 1.0 + 0.5 * iv;
    const double dt = 1e3 / k.nu;
    const auto mid = kinetic::fragmentation_substep(f, k, dt, kernel::GainRule::midpoint);
    const auto cons = kinetic::fragmentation_substep(f, k, dt, kernel::GainRule::mass_conservative);
    const double rj = g.radius(j), dr = g.dr();
    double e_mid = 0.0, e_shape = 0.0;
    for (std::size_t ix = 0; ix < g.spatial_cells(); ++ix)
        for (std::size_t iv = 0; iv < g.velocity_cells(); ++iv) {
            const double fj = f.at(ix, iv, j);
            for (int i = 0; i + 1 < j; ++i) {
                const double ri = g.radius(i);
                // Direct quadrature of the gain over the parent cell.
                const double direct = 6.0 * ri * ri / (rj * rj * rj) * dr * fj;
                e_mid = std::max(e_mid, std::abs(mid.at(ix, iv, i) - direct) / direct);
                const double shape = cons.at(ix, iv, i) / cons.at(ix, iv, 0);
                e_shape = std::max(e_shape, std::abs(shape - ri * ri / (g.radius(0) * g.radius(0))));
            }
        }
    return at_most(std::max(e_mid, e_shape), 1e-12,
                   fmt("midpoint daughters %.2e, r^2 profile after rescaling %.2e", e_mid, e_shape));
}

OracleOutcome fragmentation_mass_drift_64(const SimConfig&) {
    const auto g = make_grid(1, 2, 4, 2.0, 64, 0.5, 1.0);
    const auto k = kernel::uniform_volume_kernel(1.0, g.r_min, g.r_max);
    Distribution f = homogeneous_bump(g, 0.0, 2.0, 0.8, 0.19);
    double worst = 0.0;
    for (int s = 0; s < 10; ++s) {
        const double m0 = phase::spray_mass(f);
        f = kinetic::fragmentation_substep(f, k, 0.05);
        worst = std::max(worst, std::abs(phase::spray_mass(f) - m0) / m0);
    }
    // Midpoint weights on a kernel interval reaching close to zero, for comparison.
    const auto g2 = make_grid(1, 2, 4, 2.0, 64, 0.01, 1.0);
    const auto k2 = kernel::uniform_volume_kernel(1.0, g2.r_min, g2.r_max);
    const Distribution h = homogeneous_bump(g2, 0.0, 2.0, 0.7, 0.2);
    const double mh = phase::spray_mass(h);
    const double drift_mid =
        std::abs(phase::spray_mass(kinetic::fragmentation_substep(h, k2, 0.05, kernel::GainRule::midpoint)) - mh) / mh;
    return at_most(worst, 1e-6, fmt("per-step drift %.2e; midpoint weights on [0.01, 1] %.2e", worst, drift_mid));
}

OracleOutcome energy_balance_dt2(const SimConfig&) {
    const auto g = make_grid(1, 8, 32, 4.0, 8, 0.5, 1.0);
    std::mt19937_64 rng(11);
    const Distribution f0 = smooth_distribution(g, rng, 0.3, 1.5);
    const VectorField u(1, g.spatial_cells(), 0.0);
    auto total = [&](double dt) {
        Distribution f = f0;
        double sum = 0.0;
        const int n = static_cast<int>(std::lround(0.2 / dt));
        for (int s = 0; s < n; ++s) {
            Distribution next = kinetic::advect_step(f, u, dt);
            sum += kinetic::kinetic_energy_balance_residual(f, next, u, dt);
            f = std::move(next);
        }
        return sum;
    };
    const double a = total(0.02), b = total(0.01);
    return at_least(a / b, 3.5, fmt("accumulated residual %.3e -> %.3e", a, b));
}

OracleOutcome energy_balance_fragmentation(const SimConfig&) {
    const auto k = kernel::uniform_volume_kernel(1.0, 0.01, 1.0);
    const double dt = 0.05;
    std::vector<double> res;
    double worst_identity = 0.0;
    for (int n : {16, 32, 64}) {
        const auto g = make_grid(1, 2, 8, 2.0, n, 0.01, 1.0);
        const Distribution f = homogeneous_bump(g, 0.2, 1.5, 0.7, 0.2);
        const auto f1 = kinetic::fragmentation_substep(f, k, dt, kernel::GainRule::midpoint);
        const double k0 = phase::kinetic_energy_moment(f), k1 = phase::kinetic_energy_moment(f1);
        // The change is the Q-moment quadrature error of (1 + |xi|^2) over the substep.
        const double q = kernel::q_moment_residual(f, k, 0.0, kernel::GainRule::midpoint) +
                         kernel::q_moment_residual(f, k, 2.0, kernel::GainRule::midpoint);
        const double predicted = -std::expm1(-k.nu * dt) / k.nu * q;
        worst_identity = std::max(worst_identity, std::abs((k1 - k0) - predicted) / std::abs(predicted));
        res.push_back(std::abs(k1 - k0) / k0);
    }
    auto o = at_least(std::min(res[0] / res[1], res[1] / res[2]), 3.5,
                      fmt("residual %.3e %.3e %.3e, match to the Q-moment error %.2e", res[0], res[1], res[2],
                          worst_identity));
    o.passed = o.passed && worst_identity < 1e-8;
    return o;
}

struct LipschitzSetup {
    PhaseGrid g = make_grid(1, 16, 32, 4.0, 8, 0.5, 1.0);
    Distribution f0;
    VectorField u1;
    LipschitzSetup() {
        std::mt19937_64 rng(5);
        f0 = smooth_distribution(g, rng, 0.0, 1.5);
        u1 = VectorField(1, g.spatial_cells());
        for (std::size_t i = 0; i < g.spatial_cells(); ++i) u1(0, i) = 0.2 * std::sin(g.position(i)[0]);
    }
    kinetic::LipschitzProbe probe(double eta, double dt) const {
        VectorField u2 = u1;
        for (double& v : u2.data) v += eta;
        return kinetic::lipschitz_probe(f0, u1, u2, dt, static_cast<int>(std::lround(0.4 / dt)));
    }
};

OracleOutcome lipschitz_dt_stability(const SimConfig&) {
    const LipschitzSetup s;
    const auto a = s.probe(0.01, 0.02), b = s.probe(0.01, 0.01);
    return at_most(std::abs(b.ratio / a.ratio - 1.0), 0.2, fmt("ratio %.4e -> %.4e", a.ratio, b.ratio));
}

OracleOutcome lipschitz_linear_scaling(const SimConfig&) {
    const LipschitzSetup s;
    const auto a = s.probe(0.01, 0.01), b = s.probe(0.005, 0.01);
    const double q = b.numerator / a.numerator;
    return at_most(std::abs(q - 0.5), 0.05, fmt("numerator ratio %.4f", q));
}

}  // namespace

std::vector<OracleCase> kinetic_cases() {
    return {
        {"kinetic.backtrace_u0_ode", "kinetic", "foot points at u = 0 against an adaptive ODE solve",
         backtrace_u0_ode},
        {"kinetic.backtrace_constant_u", "kinetic", "foot points for constant u, affine velocity law",
         backtrace_constant_u},
        {"kinetic.drag_mass_conservation_64", "kinetic", "r^3 mass across drag substeps on a 64 x 64 grid",
         drag_mass_conservation_64},
        {"kinetic.drag_relaxation_rate", "kinetic", "per-shell mean velocity against the scalar relaxation ODE",
         drag_relaxation_rate},
        {"kinetic.fragmentation_stationary", "kinetic", "daughters of a single parent shell for a long substep",
         fragmentation_stationary},
        {"kinetic.fragmentation_mass_drift_64", "kinetic", "r^3 mass drift per fragmentation substep at n_r = 64",
         fragmentation_mass_drift_64},
        {"kinetic.energy_balance_dt2", "kinetic", "energy balance residual converges at second order in dt",
         energy_balance_dt2},
        {"kinetic.energy_balance_fragmentation", "kinetic", "energy change of a fragmentation step vanishes in n_r",
         energy_balance_fragmentation},
        {"kinetic.lipschitz_dt_stability", "kinetic", "Lipschitz ratio stable under dt halving",
         lipschitz_dt_stability},
        {"kinetic.lipschitz_linear_scaling", "kinetic", "moment difference linear in the velocity perturbation",
         lipschitz_linear_scaling},
    };
}

}  // namespace nsvb::harness::cases
