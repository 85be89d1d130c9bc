#include "nsvb/coupling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace nsvb::coupling {

using phase::Distribution;
using phase::VectorField;

CoupledState make_coupled_state(fluid::FluidState fl, phase::Distribution f, const spectral::Basis& basis) {
    const auto& g = f.grid;
    if (g.dim != basis.dim() || g.n_x != basis.n_x() || std::abs(g.length - basis.length()) > 1e-14 * g.length)
        throw ConfigError("n_x", "fluid and phase grids must share the spatial grid");
    if (fl.rho.size() != g.spatial_cells()) throw InputError("density samples do not match the spatial grid");
    f.validate();
    CoupledState s;
    s.fluid = std::move(fl);
    s.f = std::move(f);
    s.moments = phase::compute_moments(s.f);
    s.time = s.fluid.time;
    return s;
}

EnergyParts energy_parts(const CoupledState& s, const SimParams& p, const spectral::Basis& basis) {
    EnergyParts e;
    e.fluid_kinetic = fluid::kinetic_energy(s.fluid, basis);
    e.internal = fluid::internal_energy(s.fluid.rho, p.fluid, basis);
    e.spray = 0.5 * phase::kinetic_energy_moment(s.f);
    return e;
}

double energy(const CoupledState& s, const SimParams& p, const spectral::Basis& basis) {
    return energy_parts(s, p, basis).total();
}

void EnergyLedger::start(double t0, double e0) {
    E0 = e0;
    t.assign(1, t0);
    E.assign(1, e0);
    s.assign(1, 0.0);
    viscous_mu = viscous_lambda = eps_density = drag = 0.0;
}

std::vector<double> drag_shell_weights(const phase::PhaseGrid& g, double h) {
    std::vector<double> w(g.n_r);
    for (int ir = 0; ir < g.n_r; ++ir) {
        const double r2 = g.radius(ir) * g.radius(ir);
        w[ir] = -r2 * std::expm1(-h / r2) / h;
    }
    return w;
}

namespace {

// int r f |u - xi|^2 over phase space.
double drag_dissipation_rate(const Distribution& f, const VectorField& u) {
    const auto& g = f.grid;
    const std::size_t nx = g.spatial_cells(), nv = g.velocity_cells();
    std::vector<double> partial(nx, 0.0);
    parallel_for(nx, [&](std::size_t b, std::size_t e) {
        for (std::size_t ix = b; ix < e; ++ix) {
            double s = 0.0;
            for (std::size_t iv = 0; iv < nv; ++iv) {
                const auto xi = g.velocity(iv);
                double w = 0.0;
                for (int a = 0; a < g.dim; ++a) w += (u(a, ix) - xi[a]) * (u(a, ix) - xi[a]);
                const double* row = &f.values[g.index(ix, iv, 0)];
                for (int ir = 0; ir < g.n_r; ++ir) s += g.radius(ir) * w * row[ir];
            }
            partial[ix] = s;
        }
    });
    return pairwise_sum(partial) * g.x_volume() * g.xi_volume() * g.dr();
}

template <class F>
auto guarded(long step, const char* substep, double& seconds, F&& fn) -> decltype(fn()) {
    struct Clock {
        double& acc;
        std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
        ~Clock() { acc += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
    } clock{seconds};
    try {
        return fn();
    } catch (const SteppingError&) {
        throw;
    } catch (const Error& e) {
        throw SteppingError(step, substep, e.what());
    }
}

}  // namespace

StepInfo coupled_step(CoupledState& s, const SimParams& p, const spectral::Basis& basis, double dt,
                      EnergyLedger* ledger) {
    if (!(dt > 0.0)) throw InputError("coupled_step: dt must be positive");
    const long step = s.step;
    const auto& g = s.f.grid;
    const auto& kp = p.kinetic;
    StepInfo info;

    const VectorField u_old = fluid::velocity_samples(s.fluid.u, basis, g.n_x);
    fluid::DragSource drag;
    Distribution f_mid(g);
    Distribution f = s.f;

    if (p.splitting == Splitting::strang) {
        const double h = 0.5 * dt;
        const auto w = drag_shell_weights(g, h);
        guarded(step, "kinetic", info.seconds_kinetic, [&] {
            kinetic::free_transport(f, 0.5 * h);
            const auto ma = phase::weighted_moments(f, w);
            drag.n_a = ma.n_field;
            drag.j_a = ma.j_field;
            kinetic::velocity_drag(f, u_old, h, kp, &info.advect);
            kinetic::free_transport(f, 0.5 * h);
            kinetic::check_support(f, kp);
        });
        guarded(step, "fragmentation", info.seconds_fragmentation,
                [&] { f = kinetic::fragmentation_substep(f, p.kernel, h, kp.gain_rule); });
        f_mid = f;
        guarded(step, "fragmentation", info.seconds_fragmentation,
                [&] { f = kinetic::fragmentation_substep(f, p.kernel, h, kp.gain_rule); });
        guarded(step, "kinetic", info.seconds_kinetic, [&] {
            kinetic::free_transport(f, 0.5 * h);
            const auto mb = phase::weighted_moments(f, w);
            drag.n_b = mb.n_field;
            drag.j_b = mb.j_field;
        });
    } else {
        guarded(step, "kinetic", info.seconds_kinetic, [&] {
            f = kinetic::advect_step(f, u_old, dt, kp, &info.advect);
        });
        guarded(step, "fragmentation", info.seconds_fragmentation,
                [&] { f = kinetic::fragmentation_substep(f, p.kernel, dt, kp.gain_rule); });
        const auto m = phase::compute_moments(f);
        drag = fluid::DragSource::frozen(m.n_field, m.j_field);
        f_mid = s.f;
        for (std::size_t i = 0; i < f_mid.values.size(); ++i) f_mid.values[i] = 0.5 * (f_mid.values[i] + f.values[i]);
    }

    const auto fr = guarded(step, "fluid", info.seconds_fluid,
                            [&] { return fluid::momentum_step(s.fluid, drag, p.fluid, basis, dt); });
    info.picard_iterations = fr.iterations;
    const VectorField u_new = fluid::velocity_samples(fr.state.u, basis, g.n_x);

    if (p.splitting == Splitting::strang) {
        guarded(step, "kinetic", info.seconds_kinetic, [&] {
            kinetic::velocity_drag(f, u_new, 0.5 * dt, kp, &info.advect);
            kinetic::free_transport(f, 0.25 * dt);
            kinetic::check_support(f, kp);
        });
    }
    if (!all_finite(f.values) || f.min_value() < 0.0)
        throw SteppingError(step, "kinetic", "droplet density lost positivity or finiteness");

    // Midpoint-rule dissipation increments.
    const fluid::Coeffs u_mid_c = 0.5 * (s.fluid.u + fr.state.u);
    std::vector<double> rho_mid(s.fluid.rho.size());
    for (std::size_t i = 0; i < rho_mid.size(); ++i) rho_mid[i] = 0.5 * (s.fluid.rho[i] + fr.state.rho[i]);
    VectorField u_mid(g.dim, g.spatial_cells());
    for (std::size_t i = 0; i < u_mid.data.size(); ++i) u_mid.data[i] = 0.5 * (u_old.data[i] + u_new.data[i]);

    s.fluid = fr.state;
    s.f = std::move(f);
    s.moments = phase::compute_moments(s.f);
    s.time += dt;
    s.step += 1;
    s.fluid.time = s.time;

    if (ledger) {
        const auto rates = fluid::dissipation_rates(rho_mid, u_mid_c, p.fluid, basis);
        ledger->viscous_mu += dt * rates.viscous_mu;
        ledger->viscous_lambda += dt * rates.viscous_lambda;
        ledger->eps_density += dt * rates.eps_density;
        ledger->drag += ledger->drag_scale * dt * drag_dissipation_rate(f_mid, u_mid);
        const double e = energy(s, p, basis);
        ledger->t.push_back(s.time);
        ledger->E.push_back(e);
        ledger->s.push_back(e + ledger->dissipation() - ledger->E0);
    }
    return info;
}

double energy_inequality_check(const EnergyLedger& ledger, double t) {
    if (ledger.t.empty()) return 0.0;
    auto it = std::upper_bound(ledger.t.begin(), ledger.t.end(), t + 1e-12 * std::max(1.0, std::abs(t)));
    const std::size_t i = it == ledger.t.begin() ? 0 : static_cast<std::size_t>(it - ledger.t.begin()) - 1;
    return ledger.s[i];
}

bool energy_inequality_passes(const EnergyLedger& ledger, double tol_energy) {
    for (double v : ledger.s)
        if (!(v <= tol_energy * ledger.E0)) return false;
    return true;
}

DragChannels drag_exchange_residual(const CoupledState& before, const CoupledState& after,
                                    const spectral::Basis& basis, double dt) {
    (void)dt;
    const auto& g = before.f.grid;
    const VectorField ub = fluid::velocity_samples(before.fluid.u, basis, g.n_x);
    const VectorField ua = fluid::velocity_samples(after.fluid.u, basis, g.n_x);
    const std::size_t nx = g.spatial_cells(), nv = g.velocity_cells();
    std::vector<double> pw(nx, 0.0), pk(nx, 0.0), pd(nx, 0.0);
    for (std::size_t ix = 0; ix < nx; ++ix) {
        std::array<double, 3> u{0, 0, 0};
        for (int a = 0; a < g.dim; ++a) u[a] = 0.5 * (ub(a, ix) + ua(a, ix));
        for (std::size_t iv = 0; iv < nv; ++iv) {
            const auto xi = g.velocity(iv);
            double wu = 0.0, wx = 0.0, w2 = 0.0;
            for (int a = 0; a < g.dim; ++a) {
                const double rel = u[a] - xi[a];
                wu += rel * u[a];
                wx += rel * xi[a];
                w2 += rel * rel;
            }
            for (int ir = 0; ir < g.n_r; ++ir) {
                const double fv = 0.5 * (before.f.at(ix, iv, ir) + after.f.at(ix, iv, ir)) * g.radius(ir);
                pw[ix] -= 2.0 * fv * wu;
                pk[ix] += 2.0 * fv * wx;
                pd[ix] += 2.0 * fv * w2;
            }
        }
    }
    const double vol = g.x_volume() * g.xi_volume() * g.dr();
    DragChannels c;
    c.fluid_work = pairwise_sum(pw) * vol;
    c.kinetic_gain = pairwise_sum(pk) * vol;
    c.dissipation = pairwise_sum(pd) * vol;
    const double scale = std::abs(c.fluid_work) + std::abs(c.kinetic_gain) + std::abs(c.dissipation);
    const double sum = c.fluid_work + c.kinetic_gain + c.dissipation;
    c.residual = scale > 0.0 ? std::abs(sum) / scale : 0.0;
    return c;
}

std::array<double, 3> total_momentum(const CoupledState& s, const spectral::Basis& basis) {
    auto p = fluid::fluid_momentum(s.fluid, basis);
    const auto q = phase::spray_momentum(s.f);
    for (int a = 0; a < 3; ++a) p[a] += q[a];
    return p;
}

}  // namespace nsvb::coupling
