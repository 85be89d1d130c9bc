/// @file coupling.hpp
/// @brief The coupled gas-spray step, the energy ledger, and the coupled
///        identities (energy inequality, drag exchange, conservation).
///
/// Energy: E = int (1/2 rho |u|^2 + rho^gamma/(gamma-1) + delta rho^beta/(beta-1))
///           + 1/2 int r^3 (1 + |xi|^2) f.
/// With this normalization the drag exchange closes with dissipation
/// int r f |u - xi|^2, and the other channels are mu int |grad u|^2,
/// lambda int |div u|^2 and eps int (gamma rho^{gamma-2} + delta beta rho^{beta-2}) |grad rho|^2.
#pragma once

#include "nsvb/fluid.hpp"
#include "nsvb/kernel.hpp"
#include "nsvb/kinetic.hpp"

namespace nsvb::coupling {

enum class Splitting {
    strang,      ///< K(dt/2) F(dt) K(dt/2)
    sequential,  ///< K(dt) then F(dt) with the moments of the updated f
};

struct SimParams {
    fluid::FluidParams fluid;
    kinetic::KineticParams kinetic;
    kernel::BreakageKernel kernel;
    Splitting splitting = Splitting::strang;
};

struct CoupledState {
    fluid::FluidState fluid;
    phase::Distribution f;
    phase::MomentFields moments;  ///< moments of f, refreshed after every step
    double time = 0.0;
    long step = 0;
};

/// Builds a state and checks that the fluid and phase grids share the spatial grid.
CoupledState make_coupled_state(fluid::FluidState fluid, phase::Distribution f, const spectral::Basis& basis);

struct EnergyParts {
    double fluid_kinetic = 0.0;
    double internal = 0.0;
    double spray = 0.0;  ///< 1/2 kinetic_energy_moment(f)
    double total() const { return fluid_kinetic + internal + spray; }
};

EnergyParts energy_parts(const CoupledState& s, const SimParams& p, const spectral::Basis& basis);
double energy(const CoupledState& s, const SimParams& p, const spectral::Basis& basis);

struct EnergyLedger {
    double E0 = 0.0;
    std::vector<double> t;
    std::vector<double> E;
    std::vector<double> s;
    double viscous_mu = 0.0;
    double viscous_lambda = 0.0;
    double eps_density = 0.0;
    double drag = 0.0;
    double drag_scale = 1.0;  ///< fault injection: multiplies the drag increment

    void start(double t0, double e0);
    double dissipation() const { return viscous_mu + viscous_lambda + eps_density + drag; }
};

struct StepInfo {
    int picard_iterations = 0;
    kinetic::AdvectStats advect;
    double seconds_kinetic = 0.0;  ///< wall clock per substep family
    double seconds_fragmentation = 0.0;
    double seconds_fluid = 0.0;
};

/// Advances the state by dt. Failures are rethrown as SteppingError carrying the
/// step index and the substep ("kinetic", "fragmentation", "fluid").
StepInfo coupled_step(CoupledState& s, const SimParams& p, const spectral::Basis& basis, double dt,
                      EnergyLedger* ledger = nullptr);

/// s(t) = E(t) + accumulated dissipation - E0, at the last recorded time not after t.
double energy_inequality_check(const EnergyLedger& ledger, double t);
bool energy_inequality_passes(const EnergyLedger& ledger, double tol_energy);

struct DragChannels {
    double fluid_work = 0.0;   ///< -2 int r f (u - xi) . u
    double kinetic_gain = 0.0; ///< 2 int r (u - xi) . xi f
    double dissipation = 0.0;  ///< 2 int r f |u - xi|^2
    double residual = 0.0;     ///< |sum| relative to the channel magnitudes
};

/// Evaluates the three drag channels on the average of the two states.
DragChannels drag_exchange_residual(const CoupledState& before, const CoupledState& after,
                                    const spectral::Basis& basis, double dt);

/// Fluid plus spray momentum.
std::array<double, 3> total_momentum(const CoupledState& s, const spectral::Basis& basis);

/// Shell weights r^2 (1 - e^{-h/r^2}) / h for the drag substep of length h.
std::vector<double> drag_shell_weights(const phase::PhaseGrid& g, double h);

}  // namespace nsvb::coupling
