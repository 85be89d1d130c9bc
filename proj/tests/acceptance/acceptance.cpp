// Acceptance suite: one pass/fail line per criterion.
//
//   nsvb_acceptance                 all criteria
//   nsvb_acceptance --criterion N   criterion N only
#include "nsvb/harness/oracles.hpp"
#include "nsvb/harness/run.hpp"
#include "nsvb/harness/scenario.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <random>

using namespace nsvb;
using namespace nsvb::harness;

namespace {

struct Verdict {
    bool passed = false;
    std::string detail;
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

Verdict with_oracles(std::initializer_list<const char*> names, const SimConfig& cfg) {
    Verdict v{true, ""};
    for (const char* n : names) {
        const auto o = run_oracle(n, cfg);
        v.passed = v.passed && o.passed;
        v.detail += std::string(n) + (o.passed ? " ok " : " FAILED ") + fmt("%.3e; ", o.value);
    }
    return v;
}

// 1. Kernel hypotheses.
Verdict kernel_hypotheses() {
    const auto good = kernel::validate_hypotheses(kernel::uniform_volume_kernel(1.0, 0.5, 1.0), 256);
    const auto bad =
        kernel::validate_hypotheses(kernel::truncated_kernel(kernel::uniform_volume_kernel(1.0, 0.5, 1.0), 0.9), 256);
    const double worst = std::max({good.residual_I, good.residual_II, good.residual_III});
    return {good.passed && worst < 1e-8 && !bad.passed,
            fmt("uniform-volume worst residual %.2e; truncated kernel III residual %.2e", worst, bad.residual_III)};
}

// 2. Q-moment annihilation under radius refinement.
Verdict q_moment() {
    const auto o = run_oracle("kernel.q_moment_second_order", desk_config());
    return {o.passed, fmt("min refinement ratio %.3f; ", o.value) + o.detail};
}

// 3. Conservation at desk scale over 1000 steps.
Verdict conservation() {
    SimConfig c = builtin_scenario("coupled_smoke");
    c.fluid.eps = 0.0;
    c.grid.n_x = 64;
    c.grid.n_xi = 64;
    c.grid.n_r = 32;
    c.K = 16;
    c.t_end = 1000 * c.dt;
    c.output_every = 10;
    c.tol_fluid_mass = 1e-12;
    c.tol_spray_mass = 1e-6;
    c.tol_momentum = 1e-8;
    const auto rep = run_simulation(c);
    const auto* fm = rep.invariant("fluid_mass");
    const auto* sm = rep.invariant("spray_mass");
    const auto* mo = rep.invariant("momentum");
    const bool ok = rep.completed && rep.steps == 1000 && fm && sm && mo && fm->passed && sm->passed && mo->passed;
    return {ok, fmt("%g steps; fluid mass %.2e, spray mass %.2e, momentum %.2e per unit time", double(rep.steps),
                    fm ? fm->value : -1, sm ? sm->value : -1, mo ? mo->value : -1)};
}

// 4. Energy inequality and its order under dt halving.
Verdict energy_inequality() {
    std::vector<SimConfig> cfgs;
    for (const auto& name : scenario_names()) {
        SimConfig a = builtin_scenario(name);
        SimConfig b = a;
        b.dt *= 0.5;
        cfgs.push_back(a);
        cfgs.push_back(b);
    }
    const auto reps = run_sweep(cfgs, static_cast<int>(cfgs.size()));
    Verdict v{true, ""};
    for (std::size_t i = 0; i < reps.size(); i += 2) {
        auto stats = [](const RunReport& r) {
            double smax = -1e300, sabs = 0.0;
            for (const auto& row : r.series) {
                smax = std::max(smax, row.s);
                sabs = std::max(sabs, std::abs(row.s));
            }
            return std::pair{smax / r.baseline.E0, sabs / r.baseline.E0};
        };
        const auto [sa, aa] = stats(reps[i]);
        const auto [sb, ab] = stats(reps[i + 1]);
        // At the roundoff floor there is no time-integration error left to halve.
        const double floor = 1e-13;
        const bool at_floor = aa <= floor;
        const double ratio = ab > 0.0 ? aa / ab : (aa > 0.0 ? 1e300 : 1.0);
        const bool ok = reps[i].completed && reps[i + 1].completed && sa <= 1e-6 && sb <= 1e-6 &&
                        (at_floor || ratio >= 3.5);
        v.passed = v.passed && ok;
        v.detail += reps[i].scenario + (at_floor ? fmt(" |s|/E0 %.1e (floor); ", aa) : fmt(" ratio %.2f; ", ratio));
    }
    return v;
}

// 5. Oracle equivalence.
Verdict oracle_equivalence() {
    return with_oracles({"fluid.momentum_rhs_dense_galerkin", "coupling.monolithic_trajectory"}, desk_config());
}

// 6. Closed-form physics.
Verdict closed_form() {
    return with_oracles({"fluid.heat_kernel_decay", "kinetic.drag_relaxation_rate", "fluid.acoustic_frequency"},
                        desk_config());
}

// 7. Mass matrix bounds.
Verdict operator_bounds() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double worst = -1e300;
    for (int trial = 0; trial < 20; ++trial) {
        const int d = trial < 10 ? 1 : 2, n = d == 1 ? 16 : 12, K = 3;
        const spectral::Basis b(d, K, 2.0 * kPi, n);
        const std::size_t cells = ipow(static_cast<std::size_t>(n), d);
        // Positive band-limited density built from a few random modes.
        std::vector<double> rho(cells, 1.0);
        for (int k = 1; k <= 3; ++k) {
            const double a = 0.25 * U(rng) / k, ph = kPi * U(rng);
            for (std::size_t i = 0; i < cells; ++i) {
                const double x = static_cast<double>(i % n) * 2.0 * kPi / n;
                const double y = d == 2 ? static_cast<double>(i / n) * 2.0 * kPi / n : 0.0;
                rho[i] += a * std::cos(k * x + ph) + (d == 2 ? a * std::sin(k * y - ph) : 0.0);
            }
        }
        const auto mm = fluid::mass_matrix_build(rho, b);
        worst = std::max(worst, mm.min_rho - mm.min_eigenvalue);
    }
    double sat = 0.0;
    for (double c : {0.4, 1.0, 2.7}) {
        const spectral::Basis b(1, 3, 2.0 * kPi, 16);
        const auto mm = fluid::mass_matrix_build(std::vector<double>(16, c), b);
        sat = std::max(sat, std::abs(mm.inverse_norm() - 1.0 / c) * c);
    }
    return {worst <= 1e-10 && sat <= 1e-12,
            fmt("max (min rho - lambda_min) %.2e over 20 densities; constant-density saturation %.2e", worst, sat)};
}

// 8. Positivity every step, density bounds on eps > 0 runs.
Verdict positivity() {
    std::vector<SimConfig> cfgs;
    for (const auto& name : scenario_names()) cfgs.push_back(builtin_scenario(name));
    cfgs.push_back(desk_config());
    Verdict v{true, ""};
    for (const auto& c : cfgs) {
        RunOptions opt;
        opt.keep_history = true;
        RunHistory h;
        const auto rep = run_simulation(c, opt, &h);
        double fmin = 1e300;
        for (double m : h.f_min) fmin = std::min(fmin, m);
        bool ok = rep.completed && fmin >= 0.0 && h.f_min.size() == static_cast<std::size_t>(rep.steps + 1);
        v.detail += c.scenario + fmt(" min f %.2e", fmin);
        if (c.fluid.eps > 0.0) {
            const auto* db = rep.invariant("density_bounds");
            ok = ok && db && db->passed && db->value > 0.0;
            v.detail += fmt(", density margin %.2e", db ? db->value : -1.0);
        }
        v.detail += "; ";
        v.passed = v.passed && ok;
    }
    return v;
}

struct Criterion {
    const char* title;
    double budget_seconds;
    Verdict (*run)();
};

const Criterion kCriteria[] = {
    {"kernel hypotheses I-III", 1.0, kernel_hypotheses},
    {"Q-moment annihilation, second order in n_r", 10.0, q_moment},
    {"conservation over 1000 coupled steps", 120.0, conservation},
    {"energy inequality, second order in dt", 120.0, energy_inequality},
    {"oracle equivalence", 60.0, oracle_equivalence},
    {"closed-form physics oracles", 30.0, closed_form},
    {"mass matrix operator bounds", 10.0, operator_bounds},
    {"positivity and density bounds", 600.0, positivity},
};

bool run_one(int n) {
    const auto& c = kCriteria[n - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = c.run();
    } catch (const std::exception& e) {
        v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = v.passed && secs < c.budget_seconds;
    std::printf("criterion %d: %s  %s  [%.2f s, budget %.0f s]  %s\n", n, ok ? "PASS" : "FAIL", c.title, secs,
                c.budget_seconds, v.detail.c_str());
    std::fflush(stdout);
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    int which = 0;
    app.add_option("--criterion", which, "criterion number (1-8); all when omitted")->check(CLI::Range(1, 8));
    CLI11_PARSE(app, argc, argv);
    bool ok = true;
    for (int n = 1; n <= 8; ++n)
        if (which == 0 || which == n) ok = run_one(n) && ok;
    return ok ? 0 : 1;
}
