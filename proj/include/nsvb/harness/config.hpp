/// @file config.hpp
/// @brief Simulation configuration: schema, parsing, validation and echo.
///
/// Grammar of the text form (one item per line):
///   [section]            starts a section
///   key = value          assigns within the current section
///   # comment            ignored, also after a value
/// Values are numbers, booleans (true/false) or bare words. The JSON form is an
/// object of sections, each an object of the same keys.
#pragma once

#include "nsvb/coupling.hpp"

#include <cstdint>
#include <string>

namespace nsvb::harness {

struct InitialCondition {
    std::string kind = "equilibrium";
    double rho_mean = 1.0;
    double rho_amplitude = 0.0;  ///< relative amplitude of the cos(k x_0) density mode
    int rho_mode = 1;
    double u_amplitude = 0.0;    ///< amplitude of sin(k x_0) in the first velocity component
    int u_mode = 1;
    double spray_amplitude = 0.0;
    double spray_x_amplitude = 0.0;  ///< relative x-modulation of the spray
    double xi_center = 0.0;          ///< applied to the first velocity axis
    double xi_width = 1.0;
    double r_center = 0.0;           ///< 0 means uniform over [r_min, r_max]
    double r_width = 0.0;
    double perturbation = 0.0;       ///< seeded relative noise on the density
};

struct SimConfig {
    std::string scenario = "custom";
    std::uint64_t seed = 0;

    phase::PhaseGrid grid;
    int K = 4;
    fluid::FluidParams fluid;

    std::string kernel_type = "uniform_volume";
    double nu = 0.0;
    double kernel_truncation = 1.0;  ///< 1 keeps the kernel intact

    InitialCondition initial;

    double dt = 1e-3;
    double t_end = 0.1;
    int output_every = 1;
    int checkpoint_every = 0;

    std::string splitting = "strang";
    bool moment_fix = true;
    std::string gain_rule = "mass_conservative";
    double guard_tol = 1e-14;
    int guard_cells = 3;

    double tol_energy = 1e-6;
    double tol_fluid_mass = 1e-12;
    double tol_spray_mass = 1e-6;
    double tol_momentum = 1e-8;
    double tol_kernel = 1e-8;
    int n_quad = 256;

    /// Throws ConfigError naming the first offending key.
    void validate() const;

    spectral::Basis basis() const;
    coupling::SimParams sim_params() const;
    kernel::BreakageKernel breakage_kernel() const;
    long step_count() const;
};

SimConfig parse_config_text(const std::string& text);
SimConfig parse_config_json(const std::string& text);
/// Dispatches on content: a leading '{' selects JSON.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);

/// Text form with every key present and defaults filled in.
std::string echo_config(const SimConfig& cfg);
std::string echo_config_json(const SimConfig& cfg);

}  // namespace nsvb::harness
