/// @file kinetic.hpp
/// @brief One step of the Vlasov-Boltzmann equation for the droplets with the
///        gas velocity frozen: characteristics, semi-Lagrangian transport and
///        drag, and the fragmentation substep.
///
/// Along a characteristic dx/dt = xi, dxi/dt = (u - xi)/r^2, and the density
/// picks up the factor exp(d t / r^2) from div_xi of the drag field.
#pragma once

#include "nsvb/kernel.hpp"
#include "nsvb/phase.hpp"

namespace nsvb::kinetic {

using phase::Distribution;
using phase::PhaseGrid;
using phase::VectorField;

struct KineticParams {
    double guard_tol = 1e-14;  ///< relative to max f
    int guard_cells = 3;
    /// Restore the exact zero/first/second xi-moments of each (x, r) slice after
    /// the drag substep by a non-negative polynomial reweighting.
    bool moment_fix = true;
    kernel::GainRule gain_rule = kernel::GainRule::mass_conservative;
};

struct CharacteristicMap {
    double radius = 0.0;
    double dt = 0.0;
    double factor = 1.0;  ///< exp(d dt / r^2)
    std::vector<std::array<double, 3>> x0;   ///< per (x cell, xi cell), wrapped into [0, L)
    std::vector<std::array<double, 3>> xi0;
};

/// Foot points of the backward characteristic through every (x, xi) node for
/// shell radius r, with u frozen at the node's own x sample.
CharacteristicMap backtrace(const PhaseGrid& grid, const VectorField& u, double r, double dt);

struct AdvectStats {
    long slices = 0;
    long fallback_linear = 0;   ///< moment fix dropped the |xi|^2 constraint
    long fallback_mass = 0;     ///< moment fix kept only the zero moment
    long unfixed = 0;           ///< slice left uncorrected
};

/// Free transport over tau: f(x, xi) <- f(x - xi tau, xi), multilinear in x.
void free_transport(Distribution& f, double tau);

/// Drag relaxation over h with u frozen, exact foot points, Jacobian and
/// optional moment fix.
void velocity_drag(Distribution& f, const VectorField& u, double h, const KineticParams& params,
                   AdvectStats* stats = nullptr);

/// Throws SupportViolation if f is non-negligible in the guard band.
void check_support(const Distribution& f, const KineticParams& params);

/// Strang split X(dt/2) V(dt) X(dt/2).
Distribution advect_step(const Distribution& f, const VectorField& u, double dt, const KineticParams& params = {},
                         AdvectStats* stats = nullptr);

/// f' = e^{-nu dt} f + (1 - e^{-nu dt}) W f with W the gain matrix.
Distribution fragmentation_substep(const Distribution& f, const kernel::BreakageKernel& k, double dt,
                                   kernel::GainRule rule = kernel::GainRule::mass_conservative);

/// Integral of 2 r (u - xi) . xi f.
double drag_power(const Distribution& f, const VectorField& u);

/// |Delta K - dt * trapezoid(drag_power)| / K_before, K = kinetic_energy_moment.
double kinetic_energy_balance_residual(const Distribution& before, const Distribution& after, const VectorField& u,
                                       double dt);

struct LipschitzProbe {
    double ratio = 0.0;
    double numerator = 0.0;    ///< max over steps of sup |n1 - n2|
    double denominator = 0.0;  ///< L2 norm of u1 - u2 over time and space
    bool undefined = false;    ///< u1 == u2
};

LipschitzProbe lipschitz_probe(const Distribution& f0, const VectorField& u1, const VectorField& u2, double dt,
                               int n_steps, const KineticParams& params = {});

}  // namespace nsvb::kinetic
