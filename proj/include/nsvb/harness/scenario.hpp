/// @file scenario.hpp
/// @brief The shipped scenario library and the initial-state builder.
#pragma once

#include "nsvb/harness/config.hpp"

namespace nsvb::harness {

/// equilibrium, drag_relaxation, acoustic, fragmentation_cascade, coupled_smoke.
const std::vector<std::string>& scenario_names();

/// Throws ConfigError("scenario") for an unknown name.
SimConfig builtin_scenario(const std::string& name);

/// Density rho_mean (1 + A cos(k x_0)) plus seeded relative noise, band-limited
/// to the collocation grid; velocity A sin(k x_0) in the first component,
/// projected onto X_K; spray
///   A_s (1 + a_x cos x_0) cos^2(pi (xi - c) / (2 w)) w_r(r)
/// with the xi bump centred at c on the first axis and at 0 on the others, and
/// w_r a cos^2 bump of half-width r_width at r_center (uniform when r_center = 0).
coupling::CoupledState initial_state(const SimConfig& cfg);

}  // namespace nsvb::harness
