/// @file oracles.hpp
/// @brief Named oracle cases comparing fast paths against independent
///        references, the list of cases the suite must contain, and the
///        suite runner.
#pragma once

#include "nsvb/harness/config.hpp"

#include <functional>
#include <string>
#include <vector>

namespace nsvb::harness {

struct OracleOutcome {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    /// "<=" when value must not exceed threshold, ">=" for lower bounds.
    std::string comparison = "<=";
    std::string detail;
    double seconds = 0.0;
};

struct OracleCase {
    std::string name;
    std::string module;
    std::string summary;
    std::function<OracleOutcome(const SimConfig&)> run;
};

const std::vector<OracleCase>& oracle_registry();

/// Cases the suite is obliged to contain.
const std::vector<std::string>& required_oracles();

struct RegistryCheck {
    std::vector<std::string> missing;
    bool complete() const { return missing.empty(); }
};

RegistryCheck registry_completeness(const std::vector<OracleCase>& registry);

/// Desk-scale configuration the suite runs on by default: d = 1, K = 3,
/// n_x = 16, n_xi = 32, n_r = 8, all regularizations switched on.
SimConfig desk_config();

/// Throws ConfigError when the grid exceeds K <= 3, n_x <= 16, n_xi <= 32, n_r <= 32.
void check_desk_limits(const SimConfig& cfg);

struct OracleSuiteReport {
    std::vector<OracleOutcome> outcomes;
    RegistryCheck registry;
    bool passed() const;
};

/// Runs every case whose name contains `filter` (all when empty). A case that
/// throws is recorded as failed with the exception text.
OracleSuiteReport run_oracle_suite(const SimConfig& cfg, const std::string& filter = {});

/// Runs one named case. Throws InputError for an unknown name.
OracleOutcome run_oracle(const std::string& name, const SimConfig& cfg);

std::string oracle_report_json(const OracleSuiteReport& r);

}  // namespace nsvb::harness
