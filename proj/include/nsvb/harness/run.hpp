/// @file run.hpp
/// @brief Driving a configured simulation: ledger series, invariant table,
///        checkpoints and restart, and post-hoc checks on written series.
///
/// Series columns, in order:
///   t, E, diss_viscous_mu, diss_viscous_lambda, diss_eps_density, diss_drag,
///   s, fluid_mass, spray_mass, momentum_x, momentum_y, momentum_z,
///   rho_min, rho_max, picard_iterations
/// Dissipation columns are accumulated time integrals. s = E + dissipation - E0.
///
/// Checkpoint layout (version 1, little-endian):
///   8 bytes  "NSVBCKPT"
///   uint32   layout version
///   uint64   header length in bytes
///   header   JSON text (grid, step, time, config echo, payload table)
///   payload  float64 blocks in the order listed by the header
#pragma once

#include "nsvb/harness/config.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nsvb::harness {

struct SeriesRow {
    double t = 0.0;
    double E = 0.0;
    double diss_mu = 0.0;
    double diss_lambda = 0.0;
    double diss_eps = 0.0;
    double diss_drag = 0.0;
    double s = 0.0;
    double fluid_mass = 0.0;
    double spray_mass = 0.0;
    std::array<double, 3> momentum{0, 0, 0};
    double rho_min = 0.0;
    double rho_max = 0.0;
    int picard = 0;
};

const std::vector<std::string>& series_columns();
std::string format_series_row(const SeriesRow& r);
/// Reads a series CSV written by run_simulation. Throws InputError on a header mismatch.
std::vector<SeriesRow> read_series(const std::string& path);

struct InvariantResult {
    std::string name;
    bool passed = true;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

/// Quantities at the start of the run that later checks compare against.
struct Baseline {
    double E0 = 0.0;
    double fluid_mass = 0.0;
    double spray_mass = 0.0;
    std::array<double, 3> momentum{0, 0, 0};
    double momentum_scale = 0.0;  ///< int rho |u| + int r^3 |xi| f at t0
    double t0 = 0.0;
};

struct RunReport {
    std::string scenario;
    bool completed = false;
    std::string error;
    long error_step = -1;
    std::string error_substep;
    long steps = 0;
    double t_final = 0.0;
    Baseline baseline;
    SeriesRow final_row;
    std::vector<SeriesRow> series;
    std::vector<InvariantResult> invariants;
    std::map<std::string, double> timings;
    kinetic::AdvectStats advect;
    std::string series_path;
    std::string report_path;
    std::string last_checkpoint;

    bool passed() const;
    const InvariantResult* invariant(const std::string& name) const;
};

struct RunOptions {
    std::string out_dir;          ///< empty: nothing is written
    std::string restart_from;     ///< checkpoint to resume from
    long stop_after = -1;         ///< stop after this many steps (>= 0), for staged runs
    bool keep_history = false;    ///< keep per-step states for external checks
    double drag_scale = 1.0;      ///< fault injection into the ledger
};

/// Per-step states retained when RunOptions::keep_history is set.
struct RunHistory {
    std::vector<fluid::FluidState> fluid;
    std::vector<double> f_min;
};

RunReport run_simulation(const SimConfig& cfg, const RunOptions& opt = {}, RunHistory* history = nullptr);

/// Runs independent configurations on separate threads; substeps run serially.
std::vector<RunReport> run_sweep(const std::vector<SimConfig>& cfgs, int threads);

std::string report_json(const RunReport& r);

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

struct Checkpoint {
    SimConfig config;
    coupling::CoupledState state;
    coupling::EnergyLedger ledger;  ///< scalars only; series vectors hold the last entry
    Baseline baseline;
};

void write_checkpoint(const std::string& path, const Checkpoint& c);
Checkpoint read_checkpoint(const std::string& path);

// ---------------------------------------------------------------------------
// Post-hoc checks
// ---------------------------------------------------------------------------

/// Re-evaluates the energy, mass and dissipation invariants on a written series.
std::vector<InvariantResult> check_series(const std::vector<SeriesRow>& rows, const SimConfig& cfg);

/// Positivity, density floor, energy inequality against the stored baseline,
/// and mass drifts, recomputed from a checkpoint alone.
std::vector<InvariantResult> check_checkpoint(const Checkpoint& c);

/// Writes energy.csv, conservation.csv and density.csv for plotting. Returns the paths.
std::vector<std::string> emit_plot_tables(const std::vector<SeriesRow>& rows, const std::string& out_dir);

}  // namespace nsvb::harness
