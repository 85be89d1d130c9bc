#include "nsvb/harness/run.hpp"
#include "nsvb/harness/scenario.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace nsvb;
using namespace nsvb::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("nsvb_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string body_lines(const fs::path& p) {
    const auto s = slurp(p);
    return s.substr(s.find('\n') + 1);
}

SimConfig short_run(const std::string& name, long steps) {
    SimConfig c = builtin_scenario(name);
    c.t_end = static_cast<double>(steps) * c.dt;
    return c;
}

}  // namespace

TEST(Run, EquilibriumStaysPut) {
    const auto rep = run_simulation(builtin_scenario("equilibrium"));
    ASSERT_TRUE(rep.completed) << rep.error;
    EXPECT_TRUE(rep.passed());
    for (const auto& row : rep.series) {
        EXPECT_NEAR(row.E, rep.baseline.E0, 1e-12 * rep.baseline.E0);
        EXPECT_LE(row.s, 1e-12 * rep.baseline.E0);
    }
}

TEST(Run, InflatedDragFailsTheEnergyInequality) {
    RunOptions opt;
    opt.drag_scale = 2.0;
    const auto rep = run_simulation(builtin_scenario("drag_relaxation"), opt);
    const auto* e = rep.invariant("energy_inequality");
    ASSERT_NE(e, nullptr);
    EXPECT_FALSE(e->passed);
    EXPECT_FALSE(rep.passed());
}

TEST(Run, OversizedStepFailsInTheFluidSubstep) {
    SimConfig c = builtin_scenario("equilibrium");
    c.initial.rho_amplitude = 0.3;
    c.initial.u_amplitude = 0.5;
    c.dt = 0.5;
    c.t_end = 5 * c.dt;
    RunOptions opt;
    opt.out_dir = scratch("oversized").string();
    const auto rep = run_simulation(c, opt);
    EXPECT_FALSE(rep.completed);
    EXPECT_EQ(rep.error_step, 0);
    EXPECT_EQ(rep.error_substep, "fluid");
    EXPECT_NE(rep.error.find("Picard"), std::string::npos);
    EXPECT_TRUE(fs::exists(fs::path(opt.out_dir) / "checkpoint_last_valid.ckpt"));
}

TEST(Run, RestartIsBitwiseIdentical) {
    set_thread_count(1);
    const SimConfig c = short_run("coupled_smoke", 12);
    RunOptions full;
    full.out_dir = scratch("full").string();
    const auto a = run_simulation(c, full);
    ASSERT_TRUE(a.completed) << a.error;

    RunOptions first;
    first.out_dir = scratch("staged_a").string();
    first.stop_after = 5;
    const auto b = run_simulation(c, first);
    ASSERT_FALSE(b.last_checkpoint.empty());

    RunOptions second;
    second.out_dir = scratch("staged_b").string();
    second.restart_from = b.last_checkpoint;
    const auto r = run_simulation(SimConfig{}, second);
    ASSERT_TRUE(r.completed) << r.error;

    EXPECT_EQ(slurp(a.last_checkpoint), slurp(r.last_checkpoint));
    EXPECT_EQ(body_lines(a.series_path), body_lines(b.series_path) + body_lines(r.series_path));
}

TEST(Run, CheckpointRoundTrip) {
    const auto dir = scratch("ckpt");
    RunOptions opt;
    opt.out_dir = dir.string();
    SimConfig cfg = short_run("drag_relaxation", 4);
    cfg.checkpoint_every = 2;
    const auto rep = run_simulation(cfg, opt);
    ASSERT_FALSE(rep.last_checkpoint.empty());
    const auto c = read_checkpoint(rep.last_checkpoint);
    EXPECT_EQ(c.state.step, 4);
    const auto p = (dir / "copy.ckpt").string();
    write_checkpoint(p, c);
    EXPECT_EQ(slurp(p), slurp(rep.last_checkpoint));
    for (const auto& r : check_checkpoint(c)) EXPECT_TRUE(r.passed) << r.name << ": " << r.detail;

    std::ofstream(dir / "bad.ckpt") << "NOTACKPT and some bytes";
    EXPECT_THROW(read_checkpoint((dir / "bad.ckpt").string()), InputError);
}

TEST(Run, SeriesReadBackAndCheck) {
    const auto dir = scratch("series");
    RunOptions opt;
    opt.out_dir = dir.string();
    const SimConfig c = short_run("drag_relaxation", 20);
    const auto rep = run_simulation(c, opt);
    const auto rows = read_series(rep.series_path);
    ASSERT_EQ(rows.size(), rep.series.size());
    EXPECT_EQ(rows.back().E, rep.series.back().E);
    for (const auto& r : check_series(rows, c)) EXPECT_TRUE(r.passed) << r.name << ": " << r.detail;

    std::ofstream(dir / "bad.csv") << "t,E,nonsense\n0,1,2\n";
    EXPECT_THROW(read_series((dir / "bad.csv").string()), InputError);

    const auto files = emit_plot_tables(rows, (dir / "plots").string());
    ASSERT_EQ(files.size(), 3u);
    for (const auto& f : files) EXPECT_TRUE(fs::exists(f));
}

TEST(Run, SweepMatchesSerialRuns) {
    const std::vector<SimConfig> cfgs = {short_run("acoustic", 10), short_run("drag_relaxation", 10),
                                         short_run("fragmentation_cascade", 10)};
    const auto sweep = run_sweep(cfgs, 3);
    ASSERT_EQ(sweep.size(), cfgs.size());
    set_thread_count(1);
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        const auto serial = run_simulation(cfgs[i]);
        ASSERT_EQ(serial.series.size(), sweep[i].series.size());
        for (std::size_t k = 0; k < serial.series.size(); ++k)
            EXPECT_EQ(format_series_row(serial.series[k]), format_series_row(sweep[i].series[k]));
    }
}
