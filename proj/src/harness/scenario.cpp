#include "nsvb/harness/scenario.hpp"

#include <cmath>
#include <random>

namespace nsvb::harness {

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {"equilibrium", "drag_relaxation", "acoustic",
                                                   "fragmentation_cascade", "coupled_smoke"};
    return names;
}

SimConfig builtin_scenario(const std::string& name) {
    SimConfig c;
    c.scenario = name;
    c.initial.kind = name;
    auto& g = c.grid;
    if (name == "equilibrium") {
        g.n_x = 16;
        c.K = 4;
        g.n_xi = 16;
        g.n_r = 8;
        c.dt = 1e-2;
        c.t_end = 1.0;
    } else if (name == "drag_relaxation") {
        // Spatially homogeneous: gas at rest, droplets moving at xi = 1.
        g.n_x = 8;
        c.K = 2;
        g.n_xi = 48;
        g.xi_max = 3.0;
        g.n_r = 8;
        g.r_min = 0.8;
        g.r_max = 1.2;
        c.initial.spray_amplitude = 0.5;
        c.initial.xi_center = 1.0;
        c.initial.xi_width = 0.8;
        c.dt = 2e-3;
        c.t_end = 0.5;
    } else if (name == "acoustic") {
        g.n_x = 32;
        c.K = 8;
        g.n_xi = 8;
        g.n_r = 4;
        c.fluid.mu = 1e-6;
        c.initial.rho_amplitude = 1e-4;
        // One period of the k = 1 mode, 2 pi / sqrt(gamma rho^(gamma-1)).
        c.t_end = 2.0 * kPi / std::sqrt(c.fluid.gamma);
        c.dt = c.t_end / 1000.0;
    } else if (name == "fragmentation_cascade") {
        g.n_x = 8;
        c.K = 2;
        g.n_xi = 33;
        g.xi_max = 3.0;
        g.n_r = 32;
        g.r_min = 0.3;
        g.r_max = 1.0;
        c.nu = 1.0;
        c.initial.spray_amplitude = 1.0;
        c.initial.xi_width = 1.0;
        c.initial.r_center = 0.85;
        c.initial.r_width = 0.1;
        c.dt = 5e-3;
        c.t_end = 1.0;
    } else if (name == "coupled_smoke") {
        g.n_x = 32;
        c.K = 8;
        g.n_xi = 32;
        g.xi_max = 4.0;
        g.n_r = 8;
        c.fluid.eps = 0.01;
        c.fluid.delta = 0.01;
        c.nu = 0.5;
        c.initial.rho_amplitude = 0.2;
        c.initial.u_amplitude = 0.3;
        c.initial.spray_amplitude = 1.0;
        c.initial.spray_x_amplitude = 0.3;
        c.initial.xi_width = 1.5;
        c.dt = 1e-3;
        c.t_end = 0.1;
    } else {
        throw ConfigError("scenario", "unknown scenario '" + name + "'");
    }
    c.validate();
    return c;
}

coupling::CoupledState initial_state(const SimConfig& cfg) {
    cfg.validate();
    const auto basis = cfg.basis();
    const auto& g = cfg.grid;
    const auto& ic = cfg.initial;
    const int d = g.dim;
    const std::size_t cells = g.spatial_cells();

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> noise(-1.0, 1.0);
    std::vector<double> rho(cells), u0(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        const double x = g.position(i)[0];
        rho[i] = ic.rho_mean * (1.0 + ic.rho_amplitude * std::cos(ic.rho_mode * x));
        if (ic.perturbation > 0.0) rho[i] *= 1.0 + ic.perturbation * noise(rng);
        u0[i] = ic.u_amplitude * std::sin(ic.u_mode * x);
    }
    auto rc = spectral::coefficients(d, g.n_x, rho);
    spectral::drop_nyquist(d, g.n_x, rc);
    rho = spectral::samples(d, g.n_x, rc);

    auto fl = fluid::make_state(basis, std::move(rho));
    const auto pu = basis.project(u0, g.n_x);
    for (std::size_t m = 0; m < basis.size(); ++m) fl.u(static_cast<Eigen::Index>(m), 0) = pu[m];

    phase::Distribution f(g);
    if (ic.spray_amplitude > 0.0) {
        std::vector<double> wr(g.n_r, 1.0);
        if (ic.r_center > 0.0) {
            for (int ir = 0; ir < g.n_r; ++ir) {
                const double s = (g.radius(ir) - ic.r_center) / ic.r_width;
                wr[ir] = std::abs(s) < 1.0 ? std::pow(std::cos(0.5 * kPi * s), 2) : 0.0;
            }
        }
        for (std::size_t iv = 0; iv < g.velocity_cells(); ++iv) {
            const auto xi = g.velocity(iv);
            double h = 1.0;
            for (int a = 0; a < d; ++a) {
                const double s = (xi[a] - (a == 0 ? ic.xi_center : 0.0)) / ic.xi_width;
                h *= std::abs(s) < 1.0 ? std::pow(std::cos(0.5 * kPi * s), 2) : 0.0;
            }
            if (h == 0.0) continue;
            for (std::size_t ix = 0; ix < cells; ++ix) {
                const double mod = 1.0 + ic.spray_x_amplitude * std::cos(g.position(ix)[0]);
                for (int ir = 0; ir < g.n_r; ++ir) f.at(ix, iv, ir) = ic.spray_amplitude * mod * h * wr[ir];
            }
        }
    }
    return coupling::make_coupled_state(std::move(fl), std::move(f), basis);
}

}  // namespace nsvb::harness
