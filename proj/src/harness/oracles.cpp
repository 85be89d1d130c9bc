#include "nsvb/harness/oracles.hpp"

#include "nsvb/harness/scenario.hpp"
#include "oracle_cases.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>

namespace nsvb::harness {

const std::vector<OracleCase>& oracle_registry() {
    static const std::vector<OracleCase> reg = [] {
        std::vector<OracleCase> all;
        for (auto&& part : {cases::kernel_cases(), cases::phase_cases(), cases::kinetic_cases(), cases::fluid_cases(),
                            cases::coupling_cases(), cases::harness_cases()})
            all.insert(all.end(), part.begin(), part.end());
        return all;
    }();
    return reg;
}

// Kept separate from the registry so a dropped case shows up as missing.
const std::vector<std::string>& required_oracles() {
    static const std::vector<std::string> names = {
        "kernel.uniform_volume_value",
        "kernel.hypotheses_uniform_volume",
        "kernel.gain_nested_loop",
        "kernel.q_moment_second_order",
        "kernel.q_moment_truncated",
        "kernel.parent_mass_unit",
        "kernel.parent_mass_scaled",
        "phase.moment0_constant",
        "phase.moment0_separable",
        "phase.moment1_shifted_bump",
        "phase.spray_mass_constant",
        "phase.spray_mass_fragmentation",
        "phase.kinetic_energy_nested",
        "phase.moment_bound_u0",
        "phase.moment_bound_driven",
        "kinetic.backtrace_u0_ode",
        "kinetic.backtrace_constant_u",
        "kinetic.drag_mass_conservation_64",
        "kinetic.drag_relaxation_rate",
        "kinetic.fragmentation_stationary",
        "kinetic.fragmentation_mass_drift_64",
        "kinetic.energy_balance_dt2",
        "kinetic.energy_balance_fragmentation",
        "kinetic.lipschitz_dt_stability",
        "kinetic.lipschitz_linear_scaling",
        "fluid.pressure_pointwise",
        "fluid.heat_kernel_decay",
        "fluid.translation_constant_u",
        "fluid.density_bounds_coupled",
        "fluid.mass_matrix_lipschitz",
        "fluid.momentum_rhs_single_mode",
        "fluid.momentum_rhs_dense_galerkin",
        "fluid.pure_drag_relaxation",
        "fluid.acoustic_frequency",
        "coupling.energy_constant_state",
        "coupling.energy_two_pi",
        "coupling.homogeneous_relaxation",
        "coupling.monolithic_trajectory",
        "coupling.energy_residual_second_order",
        "coupling.drag_exchange_identity",
        "harness.relaxation_monotone_energy",
        "harness.relaxation_drag_increasing",
        "harness.registry_complete",
    };
    return names;
}

RegistryCheck registry_completeness(const std::vector<OracleCase>& registry) {
    RegistryCheck chk;
    for (const auto& name : required_oracles()) {
        const bool found =
            std::any_of(registry.begin(), registry.end(), [&](const OracleCase& c) { return c.name == name; });
        if (!found) chk.missing.push_back(name);
    }
    return chk;
}

SimConfig desk_config() {
    SimConfig c = builtin_scenario("coupled_smoke");
    c.scenario = "desk";
    c.grid.n_x = 16;
    c.K = 3;
    c.grid.n_xi = 32;
    c.grid.n_r = 8;
    c.fluid.lambda = 0.05;
    c.t_end = 0.05;
    return c;
}

void check_desk_limits(const SimConfig& cfg) {
    if (cfg.K > 3) throw ConfigError("K", "oracle suite requires K <= 3");
    if (cfg.grid.n_x > 16) throw ConfigError("n_x", "oracle suite requires n_x <= 16");
    if (cfg.grid.n_xi > 32) throw ConfigError("n_xi", "oracle suite requires n_xi <= 32");
    if (cfg.grid.n_r > 32) throw ConfigError("n_r", "oracle suite requires n_r <= 32");
}

namespace {

OracleOutcome execute(const OracleCase& c, const SimConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    OracleOutcome o;
    try {
        o = c.run(cfg);
    } catch (const std::exception& e) {
        o = OracleOutcome{};
        o.passed = false;
        o.value = std::nan("");
        o.detail = std::string("threw: ") + e.what();
    }
    o.name = c.name;
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return o;
}

}  // namespace

bool OracleSuiteReport::passed() const {
    return registry.complete() &&
           std::all_of(outcomes.begin(), outcomes.end(), [](const OracleOutcome& o) { return o.passed; });
}

OracleSuiteReport run_oracle_suite(const SimConfig& cfg, const std::string& filter) {
    cfg.validate();
    check_desk_limits(cfg);
    OracleSuiteReport rep;
    rep.registry = registry_completeness(oracle_registry());
    for (const auto& c : oracle_registry())
        if (filter.empty() || c.name.find(filter) != std::string::npos) rep.outcomes.push_back(execute(c, cfg));
    return rep;
}

OracleOutcome run_oracle(const std::string& name, const SimConfig& cfg) {
    for (const auto& c : oracle_registry())
        if (c.name == name) return execute(c, cfg);
    throw InputError("unknown oracle '" + name + "'");
}

std::string oracle_report_json(const OracleSuiteReport& r) {
    nlohmann::ordered_json j;
    j["passed"] = r.passed();
    j["registry_missing"] = r.registry.missing;
    auto& arr = j["oracles"] = nlohmann::ordered_json::array();
    for (const auto& o : r.outcomes) {
        nlohmann::ordered_json e;
        e["name"] = o.name;
        e["passed"] = o.passed;
        e["value"] = std::isfinite(o.value) ? nlohmann::ordered_json(o.value) : nlohmann::ordered_json(nullptr);
        e["comparison"] = o.comparison;
        e["threshold"] = o.threshold;
        e["detail"] = o.detail;
        e["seconds"] = o.seconds;
        arr.push_back(std::move(e));
    }
    return j.dump(2);
}

}  // namespace nsvb::harness
