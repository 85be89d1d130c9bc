#include "nsvb/oracle.hpp"

namespace nsvb::oracle {

// Plain loops over every phase cell, accumulated in storage order. Nothing here
// shares code with the fast moment routines beyond the grid geometry.

phase::ScalarField nested_moment0(const phase::Distribution& f) {
    const auto& g = f.grid;
    phase::ScalarField n(g.spatial_cells(), 0.0);
    for (std::size_t ix = 0; ix < g.spatial_cells(); ++ix) {
        long double s = 0.0L;
        for (std::size_t iv = 0; iv < g.velocity_cells(); ++iv)
            for (int ir = 0; ir < g.n_r; ++ir) s += static_cast<long double>(g.radius(ir)) * f.at(ix, iv, ir);
        n[ix] = static_cast<double>(s) * g.xi_volume() * g.dr();
    }
    return n;
}

phase::VectorField nested_moment1(const phase::Distribution& f) {
    const auto& g = f.grid;
    phase::VectorField j(g.dim, g.spatial_cells());
    for (int a = 0; a < g.dim; ++a)
        for (std::size_t ix = 0; ix < g.spatial_cells(); ++ix) {
            long double s = 0.0L;
            for (std::size_t iv = 0; iv < g.velocity_cells(); ++iv) {
                const double xi = g.velocity(iv)[a];
                for (int ir = 0; ir < g.n_r; ++ir) s += static_cast<long double>(g.radius(ir)) * xi * f.at(ix, iv, ir);
            }
            j(a, ix) = static_cast<double>(s) * g.xi_volume() * g.dr();
        }
    return j;
}

double nested_spray_mass(const phase::Distribution& f) {
    const auto& g = f.grid;
    long double s = 0.0L;
    for (std::size_t ix = 0; ix < g.spatial_cells(); ++ix)
        for (std::size_t iv = 0; iv < g.velocity_cells(); ++iv)
            for (int ir = 0; ir < g.n_r; ++ir) {
                const double r = g.radius(ir);
                s += static_cast<long double>(r * r * r) * f.at(ix, iv, ir);
            }
    return static_cast<double>(s) * g.x_volume() * g.xi_volume() * g.dr();
}

double nested_kinetic_energy(const phase::Distribution& f) {
    const auto& g = f.grid;
    long double s = 0.0L;
    for (std::size_t ix = 0; ix < g.spatial_cells(); ++ix)
        for (std::size_t iv = 0; iv < g.velocity_cells(); ++iv) {
            const auto xi = g.velocity(iv);
            double v2 = 0.0;
            for (int a = 0; a < g.dim; ++a) v2 += xi[a] * xi[a];
            for (int ir = 0; ir < g.n_r; ++ir) {
                const double r = g.radius(ir);
                s += static_cast<long double>(r * r * r * (1.0 + v2)) * f.at(ix, iv, ir);
            }
        }
    return static_cast<double>(s) * g.x_volume() * g.xi_volume() * g.dr();
}

std::vector<double> nested_gain(const phase::Distribution& f, const kernel::BreakageKernel& k) {
    const auto& g = f.grid;
    const double dr = g.dr();
    std::vector<double> out(f.values.size(), 0.0);
    for (std::size_t ix = 0; ix < g.spatial_cells(); ++ix)
        for (std::size_t iv = 0; iv < g.velocity_cells(); ++iv)
            for (int i = 0; i < g.n_r; ++i) {
                const double r = g.radius(i);
                double s = 0.0;
                // Parent cells strictly above the daughter cell.
                for (int j = i + 1; j < g.n_r; ++j) s += eval_kernel(k, r, g.radius(j)) * f.at(ix, iv, j) * dr;
                // Upper half of the daughter's own cell, midpoint r + dr/4, with f
                // interpolated linearly towards the next cell centre.
                const double fj = i + 1 < g.n_r ? 0.75 * f.at(ix, iv, i) + 0.25 * f.at(ix, iv, i + 1) : f.at(ix, iv, i);
                s += eval_kernel(k, r, r + 0.25 * dr) * fj * 0.5 * dr;
                out[g.index(ix, iv, i)] = k.nu * s;
            }
    return out;
}

}  // namespace nsvb::oracle
