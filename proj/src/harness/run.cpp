#include "nsvb/harness/run.hpp"

#include "nsvb/harness/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace nsvb::harness {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Series
// ---------------------------------------------------------------------------

const std::vector<std::string>& series_columns() {
    static const std::vector<std::string> cols = {
        "t",          "E",          "diss_viscous_mu", "diss_viscous_lambda", "diss_eps_density",
        "diss_drag",  "s",          "fluid_mass",      "spray_mass",          "momentum_x",
        "momentum_y", "momentum_z", "rho_min",         "rho_max",             "picard_iterations"};
    return cols;
}

std::string format_series_row(const SeriesRow& r) {
    char buf[640];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d",
                  r.t, r.E, r.diss_mu, r.diss_lambda, r.diss_eps, r.diss_drag, r.s, r.fluid_mass, r.spray_mass,
                  r.momentum[0], r.momentum[1], r.momentum[2], r.rho_min, r.rho_max, r.picard);
    return buf;
}

std::vector<SeriesRow> read_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read series '" + path + "'");
    std::string line;
    std::getline(in, line);
    std::string expected;
    for (const auto& c : series_columns()) expected += (expected.empty() ? "" : ",") + c;
    if (line != expected) throw InputError("series '" + path + "' has an unexpected header");
    std::vector<SeriesRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) v.push_back(std::strtod(cell.c_str(), nullptr));
        if (v.size() != series_columns().size()) throw InputError("series row with wrong column count");
        SeriesRow r;
        r.t = v[0];
        r.E = v[1];
        r.diss_mu = v[2];
        r.diss_lambda = v[3];
        r.diss_eps = v[4];
        r.diss_drag = v[5];
        r.s = v[6];
        r.fluid_mass = v[7];
        r.spray_mass = v[8];
        r.momentum = {v[9], v[10], v[11]};
        r.rho_min = v[12];
        r.rho_max = v[13];
        r.picard = static_cast<int>(v[14]);
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

bool RunReport::passed() const {
    if (!completed) return false;
    for (const auto& i : invariants)
        if (!i.passed) return false;
    return true;
}

const InvariantResult* RunReport::invariant(const std::string& name) const {
    for (const auto& i : invariants)
        if (i.name == name) return &i;
    return nullptr;
}

namespace {

json row_json(const SeriesRow& r) {
    json j;
    const auto& c = series_columns();
    const std::array<double, 14> v{r.t,          r.E,         r.diss_mu,     r.diss_lambda, r.diss_eps,
                                   r.diss_drag,  r.s,         r.fluid_mass,  r.spray_mass,  r.momentum[0],
                                   r.momentum[1], r.momentum[2], r.rho_min, r.rho_max};
    for (std::size_t i = 0; i < v.size(); ++i) j[c[i]] = v[i];
    j[c[14]] = r.picard;
    return j;
}

json invariants_json(const std::vector<InvariantResult>& inv) {
    json a = json::array();
    for (const auto& i : inv)
        a.push_back({{"name", i.name}, {"passed", i.passed}, {"value", i.value}, {"tolerance", i.tolerance},
                     {"detail", i.detail}});
    return a;
}

}  // namespace

std::string report_json(const RunReport& r) {
    json j;
    j["scenario"] = r.scenario;
    j["passed"] = r.passed();
    j["completed"] = r.completed;
    if (!r.error.empty()) j["error"] = {{"message", r.error}, {"step", r.error_step}, {"substep", r.error_substep}};
    j["steps"] = r.steps;
    j["t_final"] = r.t_final;
    j["baseline"] = {{"E0", r.baseline.E0},
                     {"fluid_mass", r.baseline.fluid_mass},
                     {"spray_mass", r.baseline.spray_mass},
                     {"momentum", r.baseline.momentum},
                     {"momentum_scale", r.baseline.momentum_scale},
                     {"t0", r.baseline.t0}};
    j["final"] = row_json(r.final_row);
    j["invariants"] = invariants_json(r.invariants);
    j["timings_seconds"] = r.timings;
    j["moment_fix"] = {{"slices", r.advect.slices},
                       {"fallback_linear", r.advect.fallback_linear},
                       {"fallback_mass", r.advect.fallback_mass},
                       {"unfixed", r.advect.unfixed}};
    j["files"] = {{"series", r.series_path}, {"report", r.report_path}, {"last_checkpoint", r.last_checkpoint}};
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'N', 'S', 'V', 'B', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kLayoutVersion = 1;

template <class T>
void put(std::ostream& o, const T& v) {
    o.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw InputError("checkpoint: truncated file");
    return v;
}

}  // namespace

void write_checkpoint(const std::string& path, const Checkpoint& c) {
    const auto& s = c.state;
    const auto& L = c.ledger;
    const auto& B = c.baseline;
    const std::vector<double> scalars = {s.time, L.E0, L.viscous_mu, L.viscous_lambda, L.eps_density, L.drag,
                                         L.E.empty() ? 0.0 : L.E.back(), L.s.empty() ? 0.0 : L.s.back(),
                                         B.E0, B.fluid_mass, B.spray_mass, B.momentum[0], B.momentum[1],
                                         B.momentum[2], B.momentum_scale, B.t0};
    std::vector<double> u;
    for (Eigen::Index c2 = 0; c2 < s.fluid.u.cols(); ++c2)
        for (Eigen::Index m = 0; m < s.fluid.u.rows(); ++m) {
            u.push_back(s.fluid.u(m, c2).real());
            u.push_back(s.fluid.u(m, c2).imag());
        }

    json h;
    h["format"] = "nsvb-checkpoint";
    h["version"] = kLayoutVersion;
    h["step"] = s.step;
    h["time"] = s.time;
    h["grid"] = {{"dim", s.f.grid.dim}, {"n_x", s.f.grid.n_x}, {"n_xi", s.f.grid.n_xi}, {"n_r", s.f.grid.n_r},
                 {"modes", s.fluid.u.rows()}};
    h["config"] = echo_config(c.config);
    h["payload"] = json::array({{{"name", "scalars"}, {"count", scalars.size()}},
                                {{"name", "rho"}, {"count", s.fluid.rho.size()}},
                                {{"name", "u_re_im"}, {"count", u.size()}},
                                {{"name", "f"}, {"count", s.f.values.size()}}});
    const std::string header = h.dump();

    const std::string tmp = path + ".tmp";
    {
        std::ofstream o(tmp, std::ios::binary);
        if (!o) throw InputError("cannot write checkpoint '" + path + "'");
        o.write(kMagic, sizeof kMagic);
        put(o, kLayoutVersion);
        put(o, static_cast<std::uint64_t>(header.size()));
        o.write(header.data(), static_cast<std::streamsize>(header.size()));
        for (const auto* block : std::array<const std::vector<double>*, 4>{&scalars, &s.fluid.rho, &u, &s.f.values})
            o.write(reinterpret_cast<const char*>(block->data()),
                    static_cast<std::streamsize>(block->size() * sizeof(double)));
        if (!o) throw InputError("checkpoint write failed for '" + path + "'");
    }
    fs::rename(tmp, path);
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read checkpoint '" + path + "'");
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw InputError("not a checkpoint file: " + path);
    const auto version = get<std::uint32_t>(in);
    if (version != kLayoutVersion) throw InputError("unsupported checkpoint layout version " + std::to_string(version));
    const auto hlen = get<std::uint64_t>(in);
    std::string header(hlen, '\0');
    in.read(header.data(), static_cast<std::streamsize>(hlen));
    if (!in) throw InputError("checkpoint: truncated header");
    const json h = json::parse(header);

    Checkpoint c;
    c.config = parse_config_text(h["config"].get<std::string>());
    const auto basis = c.config.basis();
    auto block = [&](std::size_t n) {
        std::vector<double> v(n);
        in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
        if (!in) throw InputError("checkpoint: truncated payload");
        return v;
    };
    std::vector<std::size_t> counts;
    for (const auto& p : h["payload"]) counts.push_back(p["count"].get<std::size_t>());
    if (counts.size() != 4) throw InputError("checkpoint: unexpected payload table");
    const auto scalars = block(counts[0]);
    auto rho = block(counts[1]);
    const auto u = block(counts[2]);
    auto fvals = block(counts[3]);
    if (scalars.size() != 16 || rho.size() != c.config.grid.spatial_cells() ||
        u.size() != 2 * basis.size() * static_cast<std::size_t>(basis.dim()) || fvals.size() != c.config.grid.size())
        throw InputError("checkpoint: payload does not match its configuration");

    fluid::FluidState fl = fluid::make_state(basis, std::move(rho));
    std::size_t p = 0;
    for (Eigen::Index cc = 0; cc < fl.u.cols(); ++cc)
        for (Eigen::Index m = 0; m < fl.u.rows(); ++m, p += 2) fl.u(m, cc) = spectral::cplx(u[p], u[p + 1]);
    fl.time = scalars[0];
    phase::Distribution f(c.config.grid);
    f.values = std::move(fvals);
    c.state = coupling::make_coupled_state(std::move(fl), std::move(f), basis);
    c.state.time = scalars[0];
    c.state.step = h["step"].get<long>();

    c.ledger.E0 = scalars[1];
    c.ledger.viscous_mu = scalars[2];
    c.ledger.viscous_lambda = scalars[3];
    c.ledger.eps_density = scalars[4];
    c.ledger.drag = scalars[5];
    c.ledger.t = {scalars[0]};
    c.ledger.E = {scalars[6]};
    c.ledger.s = {scalars[7]};
    c.baseline = {scalars[8], scalars[9], scalars[10], {scalars[11], scalars[12], scalars[13]}, scalars[14], scalars[15]};
    return c;
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

namespace {

double momentum_scale(const coupling::CoupledState& s, const spectral::Basis& basis) {
    const auto v = fluid::velocity_samples(s.fluid.u, basis, basis.n_x());
    double m = 0.0;
    for (std::size_t i = 0; i < s.fluid.rho.size(); ++i) {
        double v2 = 0.0;
        for (int c = 0; c < v.dim; ++c) v2 += v(c, i) * v(c, i);
        m += s.fluid.rho[i] * std::sqrt(v2);
    }
    m *= std::pow(basis.length() / basis.n_x(), basis.dim());
    return m + phase::velocity_moment(s.f, 1.0);
}

SeriesRow make_row(const coupling::CoupledState& s, const coupling::EnergyLedger& L, const spectral::Basis& basis,
                   int picard) {
    SeriesRow r;
    r.t = s.time;
    r.E = L.E.back();
    r.diss_mu = L.viscous_mu;
    r.diss_lambda = L.viscous_lambda;
    r.diss_eps = L.eps_density;
    r.diss_drag = L.drag;
    r.s = L.s.back();
    r.fluid_mass = fluid::fluid_mass(s.fluid.rho, basis);
    r.spray_mass = s.moments.spray_mass;
    r.momentum = coupling::total_momentum(s, basis);
    r.rho_min = *std::min_element(s.fluid.rho.begin(), s.fluid.rho.end());
    r.rho_max = *std::max_element(s.fluid.rho.begin(), s.fluid.rho.end());
    r.picard = picard;
    return r;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double a, double b) { return b != 0.0 ? std::abs(a - b) / std::abs(b) : std::abs(a - b); }

}  // namespace

RunReport run_simulation(const SimConfig& cfg_in, const RunOptions& opt, RunHistory* history) {
    const auto t_start = std::chrono::steady_clock::now();
    RunReport rep;

    SimConfig cfg = cfg_in;
    coupling::CoupledState s;
    coupling::EnergyLedger ledger;
    Baseline base;
    if (!opt.restart_from.empty()) {
        auto ck = read_checkpoint(opt.restart_from);
        cfg = ck.config;
        s = std::move(ck.state);
        ledger = std::move(ck.ledger);
        base = ck.baseline;
    } else {
        cfg.validate();
        s = initial_state(cfg);
    }
    ledger.drag_scale = opt.drag_scale;
    const auto basis = cfg.basis();
    const auto params = cfg.sim_params();
    rep.scenario = cfg.scenario;

    if (opt.restart_from.empty()) {
        ledger.start(s.time, coupling::energy(s, params, basis));
        base.E0 = ledger.E0;
        base.fluid_mass = fluid::fluid_mass(s.fluid.rho, basis);
        base.spray_mass = s.moments.spray_mass;
        base.momentum = coupling::total_momentum(s, basis);
        base.momentum_scale = momentum_scale(s, basis);
        base.t0 = s.time;
    }
    rep.baseline = base;

    std::ofstream series;
    if (!opt.out_dir.empty()) {
        fs::create_directories(opt.out_dir);
        rep.series_path = (fs::path(opt.out_dir) / "series.csv").string();
        series.open(rep.series_path);
        if (!series) throw InputError("cannot write '" + rep.series_path + "'");
        std::string head;
        for (const auto& c : series_columns()) head += (head.empty() ? "" : ",") + c;
        series << head << '\n';
        std::ofstream(fs::path(opt.out_dir) / "config.ini") << echo_config(cfg);
    }
    double t_io = 0.0, t_diag = 0.0;
    auto emit = [&](const SeriesRow& r) {
        const auto t0 = std::chrono::steady_clock::now();
        rep.series.push_back(r);
        if (series) series << format_series_row(r) << '\n';
        t_io += seconds_since(t0);
    };
    auto checkpoint = [&](const std::string& name) {
        if (opt.out_dir.empty()) return;
        const auto t0 = std::chrono::steady_clock::now();
        const auto path = (fs::path(opt.out_dir) / name).string();
        write_checkpoint(path, Checkpoint{cfg, s, ledger, base});
        rep.last_checkpoint = path;
        t_io += seconds_since(t0);
    };

    // A restarted series continues the original one, so the resumed state is not repeated.
    if (opt.restart_from.empty()) emit(make_row(s, ledger, basis, 0));
    if (history) {
        history->fluid.push_back(s.fluid);
        history->f_min.push_back(s.f.min_value());
    }
    const bool track_density = cfg.fluid.eps > 0.0;
    std::vector<fluid::FluidState> density_history;
    if (track_density) density_history.push_back(s.fluid);

    const long total = cfg.step_count();
    double max_s = 0.0, max_fluid = 0.0, max_spray = 0.0, max_mom = 0.0, min_f = s.f.min_value();
    bool monotone = true;
    std::string monotone_detail;
    double t_kin = 0.0, t_frag = 0.0, t_fluid = 0.0;
    long taken = 0;
    rep.completed = true;
    long last_checkpoint_step = -1;
    int last_picard = 0;
    while (s.step < total) {
        if (opt.stop_after >= 0 && taken >= opt.stop_after) {
            if (last_checkpoint_step != s.step) {
                char name[64];
                std::snprintf(name, sizeof name, "checkpoint_%08ld.ckpt", s.step);
                checkpoint(name);
            }
            break;
        }
        const double prev[4] = {ledger.viscous_mu, ledger.viscous_lambda, ledger.eps_density, ledger.drag};
        coupling::StepInfo info;
        try {
            info = coupling::coupled_step(s, params, basis, cfg.dt, &ledger);
        } catch (const SteppingError& e) {
            rep.completed = false;
            rep.error = e.what();
            rep.error_step = e.step();
            rep.error_substep = e.substep();
            checkpoint("checkpoint_last_valid.ckpt");
            break;
        }
        ++taken;
        t_kin += info.seconds_kinetic;
        t_frag += info.seconds_fragmentation;
        t_fluid += info.seconds_fluid;
        rep.advect.slices += info.advect.slices;
        rep.advect.fallback_linear += info.advect.fallback_linear;
        rep.advect.fallback_mass += info.advect.fallback_mass;
        rep.advect.unfixed += info.advect.unfixed;

        const auto td = std::chrono::steady_clock::now();
        const double now[4] = {ledger.viscous_mu, ledger.viscous_lambda, ledger.eps_density, ledger.drag};
        for (int c = 0; c < 4; ++c)
            if (now[c] < prev[c] && monotone) {
                monotone = false;
                monotone_detail = "accumulator " + std::to_string(c) + " decreased at step " + std::to_string(s.step);
            }
        const auto row = make_row(s, ledger, basis, info.picard_iterations);
        max_s = std::max(max_s, row.s);
        max_fluid = std::max(max_fluid, rel(row.fluid_mass, base.fluid_mass));
        max_spray = std::max(max_spray, rel(row.spray_mass, base.spray_mass));
        for (int a = 0; a < 3; ++a) max_mom = std::max(max_mom, std::abs(row.momentum[a] - base.momentum[a]));
        min_f = std::min(min_f, s.f.min_value());
        if (track_density) density_history.push_back(s.fluid);
        if (history) {
            history->fluid.push_back(s.fluid);
            history->f_min.push_back(s.f.min_value());
        }
        t_diag += seconds_since(td);

        if (s.step % cfg.output_every == 0 || s.step == total) emit(row);
        if (cfg.checkpoint_every > 0 && s.step % cfg.checkpoint_every == 0) {
            char name[64];
            std::snprintf(name, sizeof name, "checkpoint_%08ld.ckpt", s.step);
            checkpoint(name);
            last_checkpoint_step = s.step;
        }
        last_picard = info.picard_iterations;
    }
    rep.steps = s.step;
    rep.t_final = s.time;
    rep.final_row = make_row(s, ledger, basis, last_picard);

    // Invariant table.
    auto add = [&](std::string name, bool ok, double value, double tol, std::string detail = {}) {
        rep.invariants.push_back({std::move(name), ok, value, tol, std::move(detail)});
    };
    add("completed", rep.completed, static_cast<double>(s.step), static_cast<double>(total), rep.error);
    add("positivity", min_f >= 0.0, min_f, 0.0, "minimum of f over all steps");
    const double e_scale = base.E0 != 0.0 ? std::abs(base.E0) : 1.0;
    add("energy_inequality", max_s <= cfg.tol_energy * e_scale, max_s / e_scale, cfg.tol_energy,
        "max s(t) / E0");
    add("fluid_mass", max_fluid <= cfg.tol_fluid_mass, max_fluid, cfg.tol_fluid_mass, "relative drift");
    add("spray_mass", max_spray <= cfg.tol_spray_mass, max_spray, cfg.tol_spray_mass, "relative drift");
    add("dissipation_monotone", monotone, monotone ? 0.0 : 1.0, 0.0, monotone_detail);
    if (cfg.fluid.eps == 0.0) {
        const double span = std::max(s.time - base.t0, 1e-300);
        const double scale = base.momentum_scale > 0.0 ? base.momentum_scale : 1.0;
        const double v = max_mom / scale / span;
        add("momentum", v <= cfg.tol_momentum, v, cfg.tol_momentum, "max |P(t) - P0| / scale per unit time");
    }
    if (track_density) {
        const auto db = fluid::density_bounds_check(density_history, basis);
        std::ostringstream d;
        d << "lower margin " << db.lower_margin << ", upper margin " << db.upper_margin;
        add("density_bounds", db.passed, std::min(db.lower_margin, db.upper_margin), 0.0, d.str());
    }

    rep.timings["kinetic"] = t_kin;
    rep.timings["fragmentation"] = t_frag;
    rep.timings["fluid"] = t_fluid;
    rep.timings["diagnostics"] = t_diag;
    rep.timings["io"] = t_io;

    if (!opt.out_dir.empty()) {
        if (rep.completed && cfg.checkpoint_every > 0) checkpoint("checkpoint_final.ckpt");
        series.close();
        rep.report_path = (fs::path(opt.out_dir) / "report.json").string();
        rep.timings["total"] = seconds_since(t_start);
        std::ofstream(rep.report_path) << report_json(rep) << '\n';
    }
    rep.timings["total"] = seconds_since(t_start);
    return rep;
}

std::vector<RunReport> run_sweep(const std::vector<SimConfig>& cfgs, int threads) {
    std::vector<RunReport> out(cfgs.size());
    std::vector<std::string> errors(cfgs.size());
    const int saved = thread_count();
    set_thread_count(1);
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        for (int t = 0; t < std::max(1, threads); ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < cfgs.size(); i = next++) {
                    try {
                        out[i] = run_simulation(cfgs[i]);
                    } catch (const std::exception& e) {
                        out[i].scenario = cfgs[i].scenario;
                        out[i].error = e.what();
                    }
                }
            });
    }
    set_thread_count(saved);
    return out;
}

// ---------------------------------------------------------------------------
// Post-hoc checks and plot tables
// ---------------------------------------------------------------------------

std::vector<InvariantResult> check_series(const std::vector<SeriesRow>& rows, const SimConfig& cfg) {
    std::vector<InvariantResult> out;
    if (rows.empty()) {
        out.push_back({"series_nonempty", false, 0.0, 0.0, "no rows"});
        return out;
    }
    const auto& r0 = rows.front();
    auto diss = [](const SeriesRow& r) { return r.diss_mu + r.diss_lambda + r.diss_eps + r.diss_drag; };
    const double E0 = r0.E + diss(r0) - r0.s;
    const double e_scale = E0 != 0.0 ? std::abs(E0) : 1.0;
    double max_s = 0.0, fm = 0.0, sm = 0.0, mom = 0.0, resid = 0.0;
    bool monotone = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        max_s = std::max(max_s, r.s);
        resid = std::max(resid, std::abs(r.E + diss(r) - E0 - r.s) / e_scale);
        fm = std::max(fm, rel(r.fluid_mass, r0.fluid_mass));
        sm = std::max(sm, rel(r.spray_mass, r0.spray_mass));
        for (int a = 0; a < 3; ++a) mom = std::max(mom, std::abs(r.momentum[a] - r0.momentum[a]));
        if (i > 0) {
            const auto& p = rows[i - 1];
            if (r.diss_mu < p.diss_mu || r.diss_lambda < p.diss_lambda || r.diss_eps < p.diss_eps ||
                r.diss_drag < p.diss_drag)
                monotone = false;
        }
    }
    out.push_back({"energy_inequality", max_s <= cfg.tol_energy * e_scale, max_s / e_scale, cfg.tol_energy,
                   "max s(t) / E0"});
    out.push_back({"ledger_consistency", resid <= 1e-12, resid, 1e-12, "s equals E + dissipation - E0"});
    out.push_back({"fluid_mass", fm <= cfg.tol_fluid_mass, fm, cfg.tol_fluid_mass, "relative drift"});
    out.push_back({"spray_mass", sm <= cfg.tol_spray_mass, sm, cfg.tol_spray_mass, "relative drift"});
    out.push_back({"dissipation_monotone", monotone, monotone ? 0.0 : 1.0, 0.0, ""});
    if (cfg.fluid.eps == 0.0) {
        const double span = std::max(rows.back().t - r0.t, 1e-300);
        const double scale = std::max(r0.fluid_mass + r0.spray_mass, 1e-300);
        const double v = mom / scale / span;
        out.push_back({"momentum", v <= cfg.tol_momentum, v, cfg.tol_momentum,
                       "max |P(t) - P0| / (fluid + spray mass) per unit time"});
    }
    return out;
}

std::vector<InvariantResult> check_checkpoint(const Checkpoint& c) {
    const auto& cfg = c.config;
    const auto basis = cfg.basis();
    const auto params = cfg.sim_params();
    const auto& s = c.state;
    std::vector<InvariantResult> out;
    const double min_f = s.f.min_value();
    out.push_back({"positivity", min_f >= 0.0, min_f, 0.0, "minimum of f"});
    const double min_rho = *std::min_element(s.fluid.rho.begin(), s.fluid.rho.end());
    out.push_back({"density_floor", min_rho > cfg.fluid.rho_floor, min_rho, cfg.fluid.rho_floor, "minimum of rho"});
    const double e_scale = c.baseline.E0 != 0.0 ? std::abs(c.baseline.E0) : 1.0;
    const double E = coupling::energy(s, params, basis);
    const double sv = (E + c.ledger.dissipation() - c.baseline.E0) / e_scale;
    out.push_back({"energy_inequality", sv <= cfg.tol_energy, sv, cfg.tol_energy, "s / E0 recomputed from the state"});
    const double stored = c.ledger.s.empty() ? 0.0 : c.ledger.s.back() / e_scale;
    out.push_back({"ledger_consistency", std::abs(sv - stored) <= 1e-12, std::abs(sv - stored), 1e-12,
                   "recomputed s against the stored ledger"});
    const double fm = rel(fluid::fluid_mass(s.fluid.rho, basis), c.baseline.fluid_mass);
    out.push_back({"fluid_mass", fm <= cfg.tol_fluid_mass, fm, cfg.tol_fluid_mass, "relative drift"});
    const double sm = rel(phase::spray_mass(s.f), c.baseline.spray_mass);
    out.push_back({"spray_mass", sm <= cfg.tol_spray_mass, sm, cfg.tol_spray_mass, "relative drift"});
    return out;
}

std::vector<std::string> emit_plot_tables(const std::vector<SeriesRow>& rows, const std::string& out_dir) {
    if (rows.empty()) throw InputError("emit-plots: empty series");
    fs::create_directories(out_dir);
    const auto& r0 = rows.front();
    const double D0 = r0.diss_mu + r0.diss_lambda + r0.diss_eps + r0.diss_drag;
    const double E0 = r0.E + D0 - r0.s;
    const double es = E0 != 0.0 ? E0 : 1.0;
    const std::string pe = (fs::path(out_dir) / "energy.csv").string();
    const std::string pc = (fs::path(out_dir) / "conservation.csv").string();
    const std::string pd = (fs::path(out_dir) / "density.csv").string();
    std::ofstream e(pe), c(pc), d(pd);
    if (!e || !c || !d) throw InputError("cannot write plot tables in '" + out_dir + "'");
    e << "t,E_over_E0,dissipation_over_E0,s_over_E0,viscous_mu,viscous_lambda,eps_density,drag\n";
    c << "t,fluid_mass_drift,spray_mass_drift,momentum_x_drift,momentum_y_drift,momentum_z_drift\n";
    d << "t,rho_min,rho_max,picard_iterations\n";
    char buf[512];
    for (const auto& r : rows) {
        const double D = r.diss_mu + r.diss_lambda + r.diss_eps + r.diss_drag;
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", r.t, r.E / es, D / es,
                      r.s / es, r.diss_mu, r.diss_lambda, r.diss_eps, r.diss_drag);
        e << buf;
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", r.t,
                      r0.fluid_mass != 0.0 ? (r.fluid_mass - r0.fluid_mass) / r0.fluid_mass : 0.0,
                      r0.spray_mass != 0.0 ? (r.spray_mass - r0.spray_mass) / r0.spray_mass : 0.0,
                      r.momentum[0] - r0.momentum[0], r.momentum[1] - r0.momentum[1], r.momentum[2] - r0.momentum[2]);
        c << buf;
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%d\n", r.t, r.rho_min, r.rho_max, r.picard);
        d << buf;
    }
    return {pe, pc, pd};
}

}  // namespace nsvb::harness
