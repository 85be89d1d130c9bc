/// @file phase.hpp
/// @brief Discretized phase space (x, xi, r), the droplet density on it, and the
///        kinetic moments that couple the spray to the gas.
///
/// Storage is a dense row-major array over (x, xi, r) with the radius index
/// fastest. Spatial and velocity multi-indices are flattened row-major (axis 0
/// slowest), the same convention the FFT grids use. All integrals are midpoint
/// sums over cells; x cells are centered on the collocation nodes i*dx.
#pragma once

#include "nsvb/core.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace nsvb::phase {

struct PhaseGrid {
    int dim = 1;
    int n_x = 16;
    double length = 2.0 * kPi;
    int n_xi = 16;
    double xi_max = 4.0;
    int n_r = 8;
    double r_min = 0.5;
    double r_max = 1.0;

    /// Throws InputError naming the first violated invariant.
    void validate() const;

    std::size_t spatial_cells() const { return ipow(static_cast<std::size_t>(n_x), dim); }
    std::size_t velocity_cells() const { return ipow(static_cast<std::size_t>(n_xi), dim); }
    std::size_t size() const { return spatial_cells() * velocity_cells() * static_cast<std::size_t>(n_r); }

    double dx() const { return length / n_x; }
    double dxi() const { return 2.0 * xi_max / n_xi; }
    double dr() const { return (r_max - r_min) / n_r; }
    double x_volume() const { return std::pow(dx(), dim); }
    double xi_volume() const { return std::pow(dxi(), dim); }
    double domain_volume() const { return std::pow(length, dim); }

    double x_coord(int i) const { return i * dx(); }
    double xi_coord(int i) const { return -xi_max + (i + 0.5) * dxi(); }
    double radius(int i) const { return r_min + (i + 0.5) * dr(); }

    std::size_t index(std::size_t ix, std::size_t iv, int ir) const {
        return (ix * velocity_cells() + iv) * static_cast<std::size_t>(n_r) + static_cast<std::size_t>(ir);
    }

    std::array<int, 3> unflatten(std::size_t flat, int n) const;
    std::size_t flatten(const std::array<int, 3>& idx, int n) const;
    std::array<double, 3> position(std::size_t ix) const;
    std::array<double, 3> velocity(std::size_t iv) const;

    bool operator==(const PhaseGrid&) const = default;
};

/// Non-negative droplet density f(x, xi, r) on a PhaseGrid.
struct Distribution {
    PhaseGrid grid;
    std::vector<double> values;

    Distribution() = default;
    explicit Distribution(const PhaseGrid& g) : grid(g), values(g.size(), 0.0) {}

    double& at(std::size_t ix, std::size_t iv, int ir) { return values[grid.index(ix, iv, ir)]; }
    double at(std::size_t ix, std::size_t iv, int ir) const { return values[grid.index(ix, iv, ir)]; }

    /// Throws InputError on negative or non-finite entries.
    void validate() const;
    double max_value() const;
    double min_value() const;
};

/// d-component field sampled on the spatial grid, component-major storage.
struct VectorField {
    int dim = 1;
    std::size_t n = 0;
    std::vector<double> data;

    VectorField() = default;
    VectorField(int d, std::size_t cells, double fill = 0.0) : dim(d), n(cells), data(d * cells, fill) {}

    double& operator()(int c, std::size_t i) { return data[c * n + i]; }
    double operator()(int c, std::size_t i) const { return data[c * n + i]; }
    double max_abs() const;
};

using ScalarField = std::vector<double>;

struct MomentFields {
    ScalarField n_field;   ///< zero moment: integral of r f over (xi, r)
    VectorField j_field;   ///< first moment: integral of r xi f over (xi, r)
    double spray_mass = 0.0;
    double kinetic_energy = 0.0;
};

ScalarField moment0(const Distribution& f);
VectorField moment1(const Distribution& f);
double spray_mass(const Distribution& f);

/// Integral of r^3 (1 + |xi|^2) f.
double kinetic_energy_moment(const Distribution& f);

/// Integral of r^3 |xi|^p f.
double velocity_moment(const Distribution& f, double p);

/// Integral of r^3 xi f (total droplet momentum, one entry per axis).
std::array<double, 3> spray_momentum(const Distribution& f);

MomentFields compute_moments(const Distribution& f);

/// Zero and first moments with a per-shell weight multiplying r (used for the
/// effective drag exchange over a finite substep).
MomentFields weighted_moments(const Distribution& f, std::span<const double> shell_weight);

// ---------------------------------------------------------------------------
// Moment growth diagnostics
// ---------------------------------------------------------------------------

struct MomentBoundReport {
    std::vector<double> lhs;        ///< integral of r^3 |xi|^p f at each snapshot
    std::vector<double> rhs;        ///< structural bound without its constant
    std::vector<double> ratio;      ///< lhs / rhs (0 when both vanish)
    std::vector<double> density_ratio;  ///< L^{(N+p)/N} norm of n over its structural bound
    bool unbounded_growth = false;
    double max_ratio = 0.0;
};

/// Evaluates the p-th velocity moment against the structural form
/// (m0^{1/(N+p)} + (|f0|_inf + 1) |u|_{L^inf_t L^{N+p}_x})^{N+p} at each snapshot.
/// Growth is flagged when the ratio rises monotonically over the second half of
/// the series and ends more than `growth_factor` times its initial value.
MomentBoundReport moment_bound_check(std::span<const Distribution> f_history,
                                     std::span<const VectorField> u_history, double p,
                                     double growth_factor = 10.0);

}  // namespace nsvb::phase
