/// @file oracle.hpp
/// @brief Slow, independent reference implementations used to cross-check the
///        fast paths: nested-loop quadratures, an adaptive Runge-Kutta
///        integrator, direct-sum Galerkin assembly without FFTs, and the
///        monolithic semi-discrete ODE of the coupled scheme.
#pragma once

#include "nsvb/coupling.hpp"

#include <functional>

namespace nsvb::oracle {

// ---------------------------------------------------------------------------
// Nested-loop quadratures
// ---------------------------------------------------------------------------

phase::ScalarField nested_moment0(const phase::Distribution& f);
phase::VectorField nested_moment1(const phase::Distribution& f);
double nested_spray_mass(const phase::Distribution& f);
double nested_kinetic_energy(const phase::Distribution& f);

/// nu times the midpoint-rule gain integral, evaluated column by column with
/// the kernel law called directly.
std::vector<double> nested_gain(const phase::Distribution& f, const kernel::BreakageKernel& k);

// ---------------------------------------------------------------------------
// Adaptive ODE integration
// ---------------------------------------------------------------------------

using OdeRhs = std::function<void(double t, const std::vector<double>& y, std::vector<double>& dy)>;

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h0 = 0.0;  ///< 0 picks a start step from the rhs scale
    long max_steps = 10'000'000;
};

struct OdeStats {
    long accepted = 0;
    long rejected = 0;
};

/// Dormand-Prince 5(4) with PI step control from t0 to t1 (either direction).
std::vector<double> integrate(const OdeRhs& rhs, std::vector<double> y, double t0, double t1,
                              const OdeOptions& opt = {}, OdeStats* stats = nullptr);

// ---------------------------------------------------------------------------
// Direct-sum Galerkin assembly
// ---------------------------------------------------------------------------

/// Discrete Fourier coefficients by explicit sums, Nyquist modes removed.
std::vector<spectral::cplx> direct_dft(int dim, int n, std::span<const double> samples);

/// <rho e_k, e_l> by summing over the collocation nodes.
Eigen::MatrixXcd dense_gram(std::span<const double> rho, const spectral::Basis& basis);

/// Galerkin coefficients of -div(rho u (x) u) - grad p - eps (grad rho . grad) u
/// + mu Lap u + lambda grad div u + (j - n u), with every inner product taken
/// by explicit quadrature on a fine uniform grid and the drag term by the
/// collocation sum. The sign of the eps term is fixed.
fluid::Coeffs dense_momentum_rhs(std::span<const double> rho, const fluid::Coeffs& u, const phase::ScalarField& n,
                                 const phase::VectorField& j, const fluid::FluidParams& params,
                                 const spectral::Basis& basis);

/// d rho / dt at the collocation nodes: -div(rho u) + eps Lap rho for the
/// band-limited interpolant of rho.
std::vector<double> dense_continuity_rhs(std::span<const double> rho, const fluid::Coeffs& u,
                                         const fluid::FluidParams& params, const spectral::Basis& basis);

// ---------------------------------------------------------------------------
// Monolithic semi-discrete system
// ---------------------------------------------------------------------------

/// The coupled scheme in the limit dt -> 0, written as one ODE over the
/// concatenated vector (rho samples, Re/Im of U, f). Transport in x and drag in
/// xi are first-order upwind (the small-step limit of the multilinear
/// semi-Lagrangian updates), the per-slice moment fix becomes a rate
/// correction, fragmentation is nu (W f - f), and the fluid evolves by
/// M[rho] dU/dt = N - M[d rho/dt] U.
class MonolithicSystem {
public:
    MonolithicSystem(const coupling::SimParams& params, const spectral::Basis& basis, const phase::PhaseGrid& grid);

    std::vector<double> pack(const coupling::CoupledState& s) const;
    coupling::CoupledState unpack(const std::vector<double>& y, double t) const;
    void rhs(double t, const std::vector<double>& y, std::vector<double>& dy) const;

    std::size_t rho_size() const { return n_rho_; }
    std::size_t u_size() const { return n_u_; }
    std::size_t f_size() const { return grid_.size(); }

private:
    coupling::SimParams params_;
    spectral::Basis basis_;
    phase::PhaseGrid grid_;
    std::size_t n_rho_ = 0;
    std::size_t n_u_ = 0;
    std::vector<double> gain_;  ///< dense n_r x n_r
};

/// Integrates the monolithic system from s to time t_end.
coupling::CoupledState monolithic_trajectory(const coupling::CoupledState& s, const coupling::SimParams& params,
                                             const spectral::Basis& basis, double t_end, const OdeOptions& opt = {},
                                             OdeStats* stats = nullptr);

}  // namespace nsvb::oracle
