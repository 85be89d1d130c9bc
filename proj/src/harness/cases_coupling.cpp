// Coupled oracles: closed-form energies, the homogeneous two-phase relaxation
// ODE, the monolithic semi-discrete trajectory, the energy residual order and
// the drag exchange identity; plus the harness-level checks.
#include "oracle_cases.hpp"

#include "nsvb/harness/run.hpp"
#include "nsvb/harness/scenario.hpp"

namespace nsvb::harness::cases {

namespace {

coupling::CoupledState constant_state(const spectral::Basis& b, const phase::PhaseGrid& g, double c) {
    auto fl = fluid::make_state(b, std::vector<double>(g.spatial_cells(), c));
    return coupling::make_coupled_state(std::move(fl), phase::Distribution(g), b);
}

OracleOutcome energy_constant_state(const SimConfig&) {
    const auto g = make_grid(1, 8, 8, 2.0, 4, 0.5, 1.0);
    const spectral::Basis b(1, 2, g.length, g.n_x);
    coupling::SimParams p;
    p.fluid.gamma = 1.4;
    p.fluid.delta = 0.02;
    const double c = 1.3, beta = p.fluid.beta_value();
    const double E = coupling::energy(constant_state(b, g, c), p, b);
    const double closed =
        g.length * (std::pow(c, p.fluid.gamma) / (p.fluid.gamma - 1.0) + p.fluid.delta * std::pow(c, beta) / (beta - 1.0));
    return at_most(std::abs(E - closed) / closed, 1e-13, fmt("E = %.17g, closed form %.17g", E, closed));
}

OracleOutcome energy_two_pi(const SimConfig&) {
    const auto g = make_grid(1, 8, 8, 2.0, 4, 0.5, 1.0);
    const spectral::Basis b(1, 2, g.length, g.n_x);
    coupling::SimParams p;
    p.fluid.gamma = 2.0;
    p.fluid.delta = 0.0;
    const double E = coupling::energy(constant_state(b, g, 1.0), p, b);
    return at_most(std::abs(E - 2.0 * kPi), 1e-13, fmt("E = %.17g", E));
}

// Homogeneous relaxation: gas at rest, droplets drifting. Per unit volume the
// gas obeys rho u' = sum_r w_r (m_r - u) with w_r the shell weight of r f, and
// each shell mean obeys m_r' = (u - m_r) / r^2.
OracleOutcome homogeneous_relaxation(const SimConfig&) {
    const SimConfig cfg = builtin_scenario("drag_relaxation");
    const auto b = cfg.basis();
    const auto p = cfg.sim_params();
    auto s = initial_state(cfg);
    const auto& g = s.f.grid;
    const int nr = g.n_r;
    std::vector<double> w(nr, 0.0), y0(nr + 1, 0.0);
    double rho = 0.0;
    for (double v : s.fluid.rho) rho += v / static_cast<double>(s.fluid.rho.size());
    for (int ir = 0; ir < nr; ++ir) {
        double m0 = 0.0, m1 = 0.0;
        for (std::size_t iv = 0; iv < g.velocity_cells(); ++iv) {
            m0 += s.f.at(0, iv, ir) * g.xi_volume();
            m1 += s.f.at(0, iv, ir) * g.xi_volume() * g.velocity(iv)[0];
        }
        w[ir] = g.radius(ir) * m0 * g.dr();
        y0[ir + 1] = m1 / m0;
    }
    const auto z = static_cast<Eigen::Index>(zero_mode(b));
    y0[0] = s.fluid.u(z, 0).real() / b.norm();
    auto rhs = [&](double, const std::vector<double>& y, std::vector<double>& dy) {
        dy.assign(y.size(), 0.0);
        for (int ir = 0; ir < nr; ++ir) {
            const double r = g.radius(ir);
            dy[0] += w[ir] * (y[ir + 1] - y[0]) / rho;
            dy[ir + 1] = (y[0] - y[ir + 1]) / (r * r);
        }
    };
    const double T = cfg.t_end;
    const auto ref = oracle::integrate(rhs, y0, 0.0, T, {1e-12, 1e-14});

    const auto P0 = coupling::total_momentum(s, b);
    const long steps = cfg.step_count();
    for (long k = 0; k < steps; ++k) coupling::coupled_step(s, p, b, cfg.dt);
    const auto P1 = coupling::total_momentum(s, b);

    double err = std::abs(s.fluid.u(z, 0).real() / b.norm() - ref[0]);
    for (int ir = 0; ir < nr; ++ir) {
        double m0 = 0.0, m1 = 0.0;
        for (std::size_t iv = 0; iv < g.velocity_cells(); ++iv) {
            m0 += s.f.at(0, iv, ir);
            m1 += s.f.at(0, iv, ir) * g.velocity(iv)[0];
        }
        err = std::max(err, std::abs(m1 / m0 - ref[ir + 1]));
    }
    double scale = 0.0;
    for (int a = 0; a < 3; ++a) scale = std::max(scale, std::abs(P0[a]));
    double drift = 0.0;
    for (int a = 0; a < 3; ++a) drift = std::max(drift, std::abs(P1[a] - P0[a]) / scale / T);
    auto o = at_most(err, 1e-6,
                     fmt("gas u(T) %.8f, oracle %.8f; momentum drift %.2e per unit time",
                         s.fluid.u(z, 0).real() / b.norm(), ref[0], drift));
    o.passed = o.passed && drift < 1e-8;
    return o;
}

OracleOutcome monolithic_trajectory(const SimConfig& cfg) {
    const auto g = make_grid(1, 8, 16, 4.0, 4, 0.5, 1.0);
    const spectral::Basis b(1, 2, g.length, g.n_x);
    auto p = cfg.sim_params();
    p.kernel = kernel::uniform_volume_kernel(cfg.nu, g.r_min, g.r_max);
    std::vector<double> rho(g.n_x), us(g.n_x);
    for (int i = 0; i < g.n_x; ++i) {
        rho[i] = 1.0 + 0.2 * std::cos(g.x_coord(i));
        us[i] = 0.3 * std::sin(g.x_coord(i));
    }
    auto fl = fluid::make_state(b, rho);
    const auto pu = b.project(us, g.n_x);
    for (std::size_t m = 0; m < b.size(); ++m) fl.u(static_cast<Eigen::Index>(m), 0) = pu[m];
    phase::Distribution f(g);
    for (int ix = 0; ix < g.n_x; ++ix)
        for (int iv = 0; iv < g.n_xi; ++iv)
            for (int ir = 0; ir < g.n_r; ++ir)
                f.at(ix, iv, ir) = bump(g.xi_coord(iv), 0.0, 2.0) * (1.0 + 0.3 * std::cos(g.x_coord(ix)));
    const auto s0 = coupling::make_coupled_state(fl, f, b);

    const double T = 0.1, dt = 1e-4;
    auto s = s0;
    for (long k = 0; k < std::lround(T / dt); ++k) coupling::coupled_step(s, p, b, dt);
    oracle::OdeStats st;
    const auto ref = oracle::monolithic_trajectory(s0, p, b, T, {}, &st);

    const double er = rel_l2(s.fluid.rho, ref.fluid.rho);
    const double eu = (s.fluid.u - ref.fluid.u).norm() / ref.fluid.u.norm();
    const double ef = rel_l2(s.f.values, ref.f.values);
    return at_most(std::max({er, eu, ef}), 1e-4,
                   fmt("relative L2 at T = 0.1: rho %.2e, u %.2e, f %.2e (%ld adaptive steps)", er, eu, ef, st.accepted));
}

double max_abs_residual(const RunReport& r) {
    double m = 0.0;
    for (const auto& row : r.series) m = std::max(m, std::abs(row.s));
    return m / r.baseline.E0;
}

OracleOutcome energy_residual_second_order(const SimConfig&) {
    SimConfig c = builtin_scenario("drag_relaxation");
    const auto a = run_simulation(c);
    c.dt *= 0.5;
    const auto b = run_simulation(c);
    const double sa = max_abs_residual(a), sb = max_abs_residual(b);
    double smax = -1e300;
    for (const auto& row : a.series) smax = std::max(smax, row.s / a.baseline.E0);
    auto o = at_least(sa / sb, 3.5, fmt("max |s| / E0: %.3e -> %.3e; max s / E0 %.3e", sa, sb, smax));
    o.passed = o.passed && a.completed && b.completed && smax <= 1e-6;
    return o;
}

OracleOutcome drag_exchange_identity(const SimConfig&) {
    const SimConfig cfg = builtin_scenario("drag_relaxation");
    const auto b = cfg.basis();
    const auto p = cfg.sim_params();
    const auto s0 = initial_state(cfg);
    double worst = 0.0;
    std::string detail;
    for (double dt : {cfg.dt, 0.5 * cfg.dt}) {
        auto s = s0;
        coupling::coupled_step(s, p, b, dt);
        const auto ch = coupling::drag_exchange_residual(s0, s, b, dt);
        worst = std::max(worst, ch.residual);
        detail += fmt("dt %.1e: %.2e; ", dt, ch.residual);
    }
    return at_most(worst, 1e-13, detail);
}

// --- harness ------------------------------------------------------------------

OracleOutcome relaxation_monotone_energy(const SimConfig&) {
    const auto r = run_simulation(builtin_scenario("drag_relaxation"));
    double rise = -1e300;
    for (std::size_t i = 1; i < r.series.size(); ++i)
        rise = std::max(rise, (r.series[i].E - r.series[i - 1].E) / r.baseline.E0);
    auto o = at_most(rise, 0.0, fmt("largest relative step change of E: %.3e", rise));
    o.passed = o.passed && r.completed;
    return o;
}

OracleOutcome relaxation_drag_increasing(const SimConfig&) {
    const auto r = run_simulation(builtin_scenario("drag_relaxation"));
    double inc = 1e300;
    for (std::size_t i = 1; i < r.series.size(); ++i)
        inc = std::min(inc, r.series[i].diss_drag - r.series[i - 1].diss_drag);
    auto o = at_least(inc, 0.0, fmt("smallest increment of the drag column: %.3e", inc));
    o.passed = r.completed && inc > 0.0;
    return o;
}

OracleOutcome registry_complete(const SimConfig&) {
    const auto chk = registry_completeness(oracle_registry());
    std::string missing;
    for (const auto& m : chk.missing) missing += m + " ";
    return at_most(static_cast<double>(chk.missing.size()), 0.0, missing.empty() ? "all present" : "missing: " + missing);
}

}  // namespace

std::vector<OracleCase> coupling_cases() {
    return {
        {"coupling.energy_constant_state", "coupling", "energy of a constant state", energy_constant_state},
        {"coupling.energy_two_pi", "coupling", "energy 2 pi for gamma = 2, rho = 1", energy_two_pi},
        {"coupling.homogeneous_relaxation", "coupling", "two-phase relaxation against the exchange ODE",
         homogeneous_relaxation},
        {"coupling.monolithic_trajectory", "coupling", "coupled trajectory against the monolithic ODE",
         monolithic_trajectory},
        {"coupling.energy_residual_second_order", "coupling", "energy residual bounded and second order in dt",
         energy_residual_second_order},
        {"coupling.drag_exchange_identity", "coupling", "drag channels cancel for any dt", drag_exchange_identity},
    };
}

std::vector<OracleCase> harness_cases() {
    return {
        {"harness.relaxation_monotone_energy", "harness", "E(t) non-increasing in the relaxation run",
         relaxation_monotone_energy},
        {"harness.relaxation_drag_increasing", "harness", "drag dissipation column strictly increasing",
         relaxation_drag_increasing},
        {"harness.registry_complete", "harness", "every required oracle is registered", registry_complete},
    };
}

}  // namespace nsvb::harness::cases
