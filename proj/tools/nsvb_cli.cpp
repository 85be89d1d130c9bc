// Command-line front end: kernel validation, simulation runs and sweeps,
// post-hoc invariant checks, the oracle suite and plot tables.
//
// Exit status is 0 when every enabled check passes, 1 when a check fails and
// 2 on invalid input.
#include "nsvb/harness/oracles.hpp"
#include "nsvb/harness/run.hpp"
#include "nsvb/harness/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace nsvb;
using namespace nsvb::harness;

namespace {

struct Common {
    std::vector<std::string> configs;
    std::vector<std::string> scenarios;
    std::string out;
    int threads = 1;
    long long seed = -1;
};

void add_common(CLI::App* app, Common& c, bool multi) {
    if (multi) {
        app->add_option("--config", c.configs, "configuration file (text or JSON); repeat for a sweep");
        app->add_option("--scenario", c.scenarios, "shipped scenario name; repeat for a sweep");
    } else {
        app->add_option("--config", c.configs, "configuration file (text or JSON)")->expected(1);
        app->add_option("--scenario", c.scenarios, "shipped scenario name")->expected(1);
    }
    app->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
    app->add_option("--seed", c.seed, "override the configured seed")->check(CLI::NonNegativeNumber);
}

std::vector<SimConfig> resolve(const Common& c) {
    std::vector<SimConfig> out;
    for (const auto& p : c.configs) out.push_back(load_config(p));
    for (const auto& s : c.scenarios) out.push_back(builtin_scenario(s));
    if (c.seed >= 0)
        for (auto& cfg : out) cfg.seed = static_cast<std::uint64_t>(c.seed);
    return out;
}

void print_invariants(const std::vector<InvariantResult>& inv) {
    for (const auto& r : inv)
        std::printf("  %-22s %s  %12.4e  (tol %.1e)  %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.value,
                    r.tolerance, r.detail.c_str());
}

bool all_passed(const std::vector<InvariantResult>& inv) {
    for (const auto& r : inv)
        if (!r.passed) return false;
    return true;
}

int cmd_validate_kernel(const Common& c, int n_quad) {
    auto cfgs = resolve(c);
    const SimConfig cfg = cfgs.empty() ? SimConfig{} : cfgs.front();
    auto k = cfg.breakage_kernel();
    if (n_quad <= 0) n_quad = cfg.n_quad;
    const auto rep = kernel::validate_hypotheses(k, n_quad, cfg.tol_kernel);
    std::printf("kernel %s on [%g, %g], n_quad %d, tolerance %.1e\n", k.label.c_str(), k.r_min, k.r_max, rep.n_quad,
                rep.tolerance);
    std::printf("  I   (sign, support)  %.3e%s\n", rep.residual_I,
                rep.finite ? "" : "  non-finite values");
    std::printf("  II  (mirror)         %.3e\n", rep.residual_II);
    std::printf("  III (normalization)  %.3e\n", rep.residual_III);
    const auto pm = kernel::parent_mass_residual(k, k.r_max, std::max(n_quad, 512));
    std::printf("  parent mass at r* = %g: %.3e\n", k.r_max, pm.residual);
    std::printf("%s\n", rep.passed ? "PASS" : "FAIL");
    return rep.passed ? 0 : 1;
}

int cmd_run(const Common& c, const std::string& restart, double drag_scale) {
    if (!restart.empty()) {
        RunOptions opt;
        opt.restart_from = restart;
        opt.out_dir = c.out;
        opt.drag_scale = drag_scale;
        set_thread_count(c.threads);
        const auto rep = run_simulation(SimConfig{}, opt);
        std::printf("run %s (restart): %ld steps, t = %.6g%s\n", rep.scenario.c_str(), rep.steps, rep.t_final,
                    rep.completed ? "" : ("  " + rep.error).c_str());
        print_invariants(rep.invariants);
        return rep.passed() ? 0 : 1;
    }
    const auto cfgs = resolve(c);
    if (cfgs.empty()) throw InputError("run: give --config or --scenario");
    std::vector<RunReport> reps;
    if (cfgs.size() == 1) {
        set_thread_count(c.threads);
        RunOptions opt;
        opt.out_dir = c.out;
        opt.drag_scale = drag_scale;
        reps.push_back(run_simulation(cfgs.front(), opt));
    } else {
        reps = run_sweep(cfgs, c.threads);
        if (!c.out.empty())
            for (std::size_t i = 0; i < reps.size(); ++i) {
                const auto dir = std::filesystem::path(c.out) / (std::to_string(i) + "_" + cfgs[i].scenario);
                std::filesystem::create_directories(dir);
                std::ofstream(dir / "report.json") << report_json(reps[i]) << '\n';
                std::ofstream(dir / "config.ini") << echo_config(cfgs[i]);
                std::ofstream series(dir / "series.csv");
                std::string head;
                for (const auto& col : series_columns()) head += (head.empty() ? "" : ",") + col;
                series << head << '\n';
                for (const auto& row : reps[i].series) series << format_series_row(row) << '\n';
            }
    }
    bool ok = true;
    for (const auto& rep : reps) {
        std::printf("run %s: %ld steps, t = %.6g, %.2f s%s\n", rep.scenario.c_str(), rep.steps, rep.t_final,
                    rep.timings.count("total") ? rep.timings.at("total") : 0.0,
                    rep.completed ? "" : ("  " + rep.error).c_str());
        print_invariants(rep.invariants);
        ok = ok && rep.passed();
    }
    return ok ? 0 : 1;
}

int cmd_check(const Common& c, const std::string& series, const std::string& checkpoint) {
    if (series.empty() == checkpoint.empty())
        throw InputError("check-invariants: give exactly one of --series, --checkpoint");
    std::vector<InvariantResult> inv;
    if (!checkpoint.empty()) {
        inv = check_checkpoint(read_checkpoint(checkpoint));
    } else {
        auto cfgs = resolve(c);
        SimConfig cfg;
        if (!cfgs.empty()) {
            cfg = cfgs.front();
        } else {
            // A run directory carries its own echoed configuration.
            const auto beside = std::filesystem::path(series).parent_path() / "config.ini";
            if (std::filesystem::exists(beside)) cfg = load_config(beside.string());
        }
        inv = check_series(read_series(series), cfg);
    }
    print_invariants(inv);
    return all_passed(inv) ? 0 : 1;
}

int cmd_oracle(const Common& c, const std::string& filter, bool list, bool eps_flip) {
    if (list) {
        for (const auto& o : oracle_registry()) std::printf("%-42s %s\n", o.name.c_str(), o.summary.c_str());
        return 0;
    }
    auto cfgs = resolve(c);
    SimConfig cfg = cfgs.empty() ? desk_config() : cfgs.front();
    if (c.seed >= 0) cfg.seed = static_cast<std::uint64_t>(c.seed);
    if (eps_flip) cfg.fluid.inject_eps_sign_flip = true;
    set_thread_count(c.threads);
    const auto rep = run_oracle_suite(cfg, filter);
    for (const auto& o : rep.outcomes)
        std::printf("%-42s %s  %12.4e %s %.1e  %6.2fs  %s\n", o.name.c_str(), o.passed ? "PASS" : "FAIL", o.value,
                    o.comparison.c_str(), o.threshold, o.seconds, o.detail.c_str());
    for (const auto& m : rep.registry.missing) std::printf("missing oracle: %s\n", m.c_str());
    if (!c.out.empty()) {
        std::filesystem::create_directories(c.out);
        std::ofstream(std::filesystem::path(c.out) / "oracles.json") << oracle_report_json(rep) << '\n';
    }
    std::printf("%s\n", rep.passed() ? "PASS" : "FAIL");
    return rep.passed() ? 0 : 1;
}

int cmd_emit_plots(const std::string& series, const std::string& out) {
    for (const auto& p : emit_plot_tables(read_series(series), out)) std::printf("%s\n", p.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gas-spray simulation driver"};
    app.require_subcommand(1);

    Common kc, rc, cc, oc;
    int n_quad = 0;
    auto* vk = app.add_subcommand("validate-kernel", "check hypotheses I-III of the configured breakage kernel");
    add_common(vk, kc, false);
    vk->add_option("--n-quad", n_quad, "quadrature points (default from config)");

    std::string restart;
    double drag_scale = 1.0;
    auto* run = app.add_subcommand("run", "run scenarios or configurations and report invariants");
    add_common(run, rc, true);
    run->add_option("--out", rc.out, "output directory for series, report and checkpoints");
    run->add_option("--restart", restart, "resume from a checkpoint file");
    run->add_option("--inject-drag-scale", drag_scale, "fault injection: scale the drag ledger increment")
        ->group("");

    std::string series, checkpoint;
    auto* chk = app.add_subcommand("check-invariants", "re-check invariants on a written series or checkpoint");
    add_common(chk, cc, false);
    chk->add_option("--series", series, "series.csv written by run");
    chk->add_option("--checkpoint", checkpoint, "checkpoint written by run");

    std::string filter;
    bool list = false, eps_flip = false;
    auto* orc = app.add_subcommand("oracle", "run the oracle suite at desk scale");
    add_common(orc, oc, false);
    orc->add_option("--out", oc.out, "directory for oracles.json");
    orc->add_option("--filter", filter, "only oracles whose name contains this text");
    orc->add_flag("--list", list, "list registered oracles");
    orc->add_flag("--inject-eps-sign-flip", eps_flip, "fault injection into the momentum right-hand side")->group("");

    std::string plot_series, plot_out;
    auto* plots = app.add_subcommand("emit-plots", "turn a series into plot-ready CSV tables");
    plots->add_option("--series", plot_series, "series.csv written by run")->required();
    plots->add_option("--out", plot_out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*vk) return cmd_validate_kernel(kc, n_quad);
        if (*run) return cmd_run(rc, restart, drag_scale);
        if (*chk) return cmd_check(cc, series, checkpoint);
        if (*orc) return cmd_oracle(oc, filter, list, eps_flip);
        if (*plots) return cmd_emit_plots(plot_series, plot_out);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
