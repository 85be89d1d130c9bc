/// @file fluid.hpp
/// @brief The eps,delta-regularized compressible Navier-Stokes subsystem on a
///        Fourier-Galerkin space with frozen spray moments.
///
/// Density lives as band-limited samples on the n_x collocation grid. Velocity
/// lives as coefficients U (modes x d) in the orthonormal basis of X_K, so
/// u(x) = sum_k U_k e_k(x). Products with the spray moments and the mass matrix
/// are collocation sums on the n_x grid; the transport nonlinearities use the
/// padded grid, where they are exact on X_K.
#pragma once

#include "nsvb/phase.hpp"
#include "nsvb/spectral.hpp"

#include <Eigen/Dense>

namespace nsvb::fluid {

using spectral::cplx;
using Coeffs = Eigen::MatrixXcd;

struct FluidParams {
    double gamma = 1.4;
    double beta = 0.0;  ///< 0 selects max(gamma, 4) + 1
    double mu = 0.1;
    double lambda = 0.0;
    double eps = 0.0;
    double delta = 0.0;
    double rho_floor = 1e-10;  ///< densities at or below this are a positivity failure
    double tol_picard = 1e-12;
    int max_iter = 60;
    bool inject_eps_sign_flip = false;  ///< fault injection for the oracle suite

    double beta_value() const;
    /// Throws ConfigError naming the offending key.
    void validate() const;
};

struct FluidState {
    double time = 0.0;
    std::vector<double> rho;  ///< n_x^d collocation samples
    Coeffs u;                 ///< basis.size() x d
};

FluidState make_state(const spectral::Basis& basis, std::vector<double> rho);

/// p = rho^gamma + delta rho^beta pointwise.
std::vector<double> pressure(std::span<const double> rho, const FluidParams& params);

/// Advances rho_t + div(rho u) = eps Lap rho with u frozen: Lawson RK4 with the
/// exact heat factor, dealiased advection, mean mode untouched.
std::vector<double> continuity_advance(const spectral::Basis& basis, const FluidParams& params,
                                       std::span<const double> rho, const Coeffs& u, double dt);
std::vector<double> continuity_step(const FluidState& state, const spectral::Basis& basis,
                                    const FluidParams& params, double dt);

/// Collocation Gram matrix G_lk = sum_i w_i e_k(x_i) conj(e_l(x_i)) dx^d.
Eigen::MatrixXcd gram_matrix(std::span<const double> weight, const spectral::Basis& basis);

struct MassMatrix {
    Eigen::MatrixXcd matrix;
    Eigen::LDLT<Eigen::MatrixXcd> ldlt;
    double min_rho = 0.0;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;

    Coeffs solve(const Coeffs& rhs) const { return ldlt.solve(rhs); }
    double inverse_norm() const { return 1.0 / min_eigenvalue; }
};

/// Throws PositivityError if min rho <= 0 and SingularityError if the
/// factorization or the eigenvalue bound fails.
MassMatrix mass_matrix_build(std::span<const double> rho, const spectral::Basis& basis);

/// Projection onto X_K of -div(rho u (x) u) - grad p + (-eps grad u . grad rho).
Coeffs nonlinear_rhs(std::span<const double> rho, const Coeffs& u, const FluidParams& params,
                     const spectral::Basis& basis);
/// Galerkin coefficients of mu Lap u + lambda grad div u.
Coeffs viscous_rhs(const Coeffs& u, const FluidParams& params, const spectral::Basis& basis);
/// Collocation projection of j - n u.
Coeffs drag_rhs(const phase::ScalarField& n, const phase::VectorField& j, const Coeffs& u,
                const spectral::Basis& basis);

Coeffs momentum_rhs(const FluidState& state, const phase::ScalarField& n, const phase::VectorField& j,
                    const FluidParams& params, const spectral::Basis& basis);

/// Drag over one step: -1/2 [(n_a u_old - j_a) + (n_b u_new - j_b)].
struct DragSource {
    phase::ScalarField n_a, n_b;
    phase::VectorField j_a, j_b;

    static DragSource frozen(const phase::ScalarField& n, const phase::VectorField& j);
    static DragSource none(const spectral::Basis& basis);
};

struct MomentumStepResult {
    FluidState state;
    int iterations = 0;
    double last_update = 0.0;
};

/// Implicit midpoint for the coupled continuity + momentum system, solved by
/// Picard iteration. Viscosity and the new-state drag are taken implicitly in
/// each iterate; the remaining terms are evaluated at the current midpoint.
/// Throws ConvergenceError when max_iter is exhausted.
MomentumStepResult momentum_step(const FluidState& state, const DragSource& drag, const FluidParams& params,
                                 const spectral::Basis& basis, double dt);

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

phase::VectorField velocity_samples(const Coeffs& u, const spectral::Basis& basis, int n);
double fluid_mass(std::span<const double> rho, const spectral::Basis& basis);
std::array<double, 3> fluid_momentum(const FluidState& s, const spectral::Basis& basis);
double kinetic_energy(const FluidState& s, const spectral::Basis& basis);
double internal_energy(std::span<const double> rho, const FluidParams& params, const spectral::Basis& basis);

struct DissipationRates {
    double viscous_mu = 0.0;      ///< mu int |grad u|^2
    double viscous_lambda = 0.0;  ///< lambda int |div u|^2
    double eps_density = 0.0;     ///< eps int (gamma rho^{gamma-2} + delta beta rho^{beta-2}) |grad rho|^2
};
DissipationRates dissipation_rates(std::span<const double> rho, const Coeffs& u, const FluidParams& params,
                                   const spectral::Basis& basis);

/// max |div u| over the padded grid.
double max_divergence(const Coeffs& u, const spectral::Basis& basis);

struct DensityBoundsReport {
    double rho_lower = 0.0;   ///< min rho at the first snapshot
    double rho_upper = 0.0;   ///< max rho at the first snapshot
    double lower_margin = 0.0;  ///< min over t > t0 of [min rho(t) - rho_lower e^{-D(t)}]
    double upper_margin = 0.0;  ///< min over t > t0 of [rho_upper e^{D(t)} - max rho(t)]
    std::vector<double> divergence_integral;
    bool passed = true;
};

/// D(t) is the trapezoid integral of max |div u|. Violations are reported.
DensityBoundsReport density_bounds_check(std::span<const FluidState> history, const spectral::Basis& basis);

}  // namespace nsvb::fluid
