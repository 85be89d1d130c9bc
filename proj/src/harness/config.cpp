#include "nsvb/harness/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace nsvb::harness {

namespace {

enum class Kind { number, integer, text, boolean };

struct Field {
    const char* section;
    const char* key;
    Kind kind;
    std::function<void(SimConfig&, const std::string&)> set;
    std::function<std::string(const SimConfig&)> get;
};

// Shortest text that reads back to the same double.
std::string fmt_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double to_double(const std::string& key, const std::string& v) {
    const char* b = v.c_str();
    char* end = nullptr;
    const double x = std::strtod(b, &end);
    if (end == b || *end != '\0' || !std::isfinite(x)) throw ConfigError(key, "expected a finite number, got '" + v + "'");
    return x;
}

long long to_integer(const std::string& key, const std::string& v) {
    const char* b = v.c_str();
    char* end = nullptr;
    const long long x = std::strtoll(b, &end, 10);
    if (end == b || *end != '\0') throw ConfigError(key, "expected an integer, got '" + v + "'");
    return x;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key, "expected true or false, got '" + v + "'");
}

#define NUM(sec, name, member)                                                                             \
    Field{sec, name, Kind::number, [](SimConfig& c, const std::string& v) { c.member = to_double(name, v); }, \
          [](const SimConfig& c) { return fmt_double(c.member); }}
#define INT(sec, name, member)                                                                   \
    Field{sec, name, Kind::integer,                                                              \
          [](SimConfig& c, const std::string& v) {                                               \
              c.member = static_cast<decltype(c.member)>(to_integer(name, v));                   \
          },                                                                                     \
          [](const SimConfig& c) { return std::to_string(c.member); }}
#define TXT(sec, name, member)                                                                        \
    Field{sec, name, Kind::text, [](SimConfig& c, const std::string& v) { c.member = v; },         \
          [](const SimConfig& c) { return c.member; }}
#define BOOL(sec, name, member)                                                                            \
    Field{sec, name, Kind::boolean, [](SimConfig& c, const std::string& v) { c.member = to_bool(name, v); }, \
          [](const SimConfig& c) { return std::string(c.member ? "true" : "false"); }}

const std::vector<Field>& schema() {
    static const std::vector<Field> fields = {
        TXT("run", "scenario", scenario),
        Field{"run", "seed", Kind::integer,
              [](SimConfig& c, const std::string& v) {
                  const long long s = to_integer("seed", v);
                  if (s < 0) throw ConfigError("seed", "seed must be non-negative");
                  c.seed = static_cast<std::uint64_t>(s);
              },
              [](const SimConfig& c) { return std::to_string(c.seed); }},

        INT("grid", "dim", grid.dim),
        INT("grid", "n_x", grid.n_x),
        NUM("grid", "length", grid.length),
        INT("grid", "n_xi", grid.n_xi),
        NUM("grid", "xi_max", grid.xi_max),
        INT("grid", "n_r", grid.n_r),
        NUM("grid", "r_min", grid.r_min),
        NUM("grid", "r_max", grid.r_max),
        INT("grid", "K", K),

        NUM("fluid", "gamma", fluid.gamma),
        Field{"fluid", "beta", Kind::number, [](SimConfig& c, const std::string& v) { c.fluid.beta = to_double("beta", v); },
              [](const SimConfig& c) { return fmt_double(c.fluid.beta_value()); }},
        NUM("fluid", "mu", fluid.mu),
        NUM("fluid", "lambda", fluid.lambda),
        NUM("fluid", "eps", fluid.eps),
        NUM("fluid", "delta", fluid.delta),
        NUM("fluid", "rho_floor", fluid.rho_floor),
        BOOL("fluid", "inject_eps_sign_flip", fluid.inject_eps_sign_flip),

        TXT("kernel", "type", kernel_type),
        NUM("kernel", "nu", nu),
        NUM("kernel", "truncation", kernel_truncation),

        TXT("initial", "kind", initial.kind),
        NUM("initial", "rho_mean", initial.rho_mean),
        NUM("initial", "rho_amplitude", initial.rho_amplitude),
        INT("initial", "rho_mode", initial.rho_mode),
        NUM("initial", "u_amplitude", initial.u_amplitude),
        INT("initial", "u_mode", initial.u_mode),
        NUM("initial", "spray_amplitude", initial.spray_amplitude),
        NUM("initial", "spray_x_amplitude", initial.spray_x_amplitude),
        NUM("initial", "xi_center", initial.xi_center),
        NUM("initial", "xi_width", initial.xi_width),
        NUM("initial", "r_center", initial.r_center),
        NUM("initial", "r_width", initial.r_width),
        NUM("initial", "perturbation", initial.perturbation),

        NUM("time", "dt", dt),
        NUM("time", "t_end", t_end),
        INT("time", "output_every", output_every),
        INT("time", "checkpoint_every", checkpoint_every),

        NUM("solver", "tol_picard", fluid.tol_picard),
        INT("solver", "max_iter", fluid.max_iter),
        TXT("solver", "splitting", splitting),
        BOOL("solver", "moment_fix", moment_fix),
        TXT("solver", "gain_rule", gain_rule),
        NUM("solver", "guard_tol", guard_tol),
        INT("solver", "guard_cells", guard_cells),

        NUM("tolerances", "energy", tol_energy),
        NUM("tolerances", "fluid_mass", tol_fluid_mass),
        NUM("tolerances", "spray_mass", tol_spray_mass),
        NUM("tolerances", "momentum", tol_momentum),
        NUM("tolerances", "kernel", tol_kernel),
        INT("tolerances", "n_quad", n_quad),
    };
    return fields;
}

#undef NUM
#undef INT
#undef TXT
#undef BOOL

const Field& find_field(const std::string& section, const std::string& key) {
    bool section_known = false;
    for (const auto& f : schema()) {
        if (section == f.section) {
            section_known = true;
            if (key == f.key) return f;
        }
    }
    if (!section_known) throw ConfigError(section, "unknown section [" + section + "]");
    throw ConfigError(key, "unknown key in section [" + section + "]");
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

const std::vector<std::string> kKinds = {"equilibrium", "drag_relaxation", "acoustic", "fragmentation_cascade",
                                         "coupled_smoke"};

}  // namespace

void SimConfig::validate() const {
    auto positive_count = [](const char* key, long v, long lo) {
        if (v < lo) throw ConfigError(key, "must be at least " + std::to_string(lo));
    };
    if (grid.dim < 1 || grid.dim > 3) throw ConfigError("dim", "dimension must be 1, 2 or 3");
    positive_count("n_x", grid.n_x, 2);
    positive_count("n_xi", grid.n_xi, 2);
    positive_count("n_r", grid.n_r, 2);
    if (!(grid.length > 0.0)) throw ConfigError("length", "torus side must be positive");
    if (!(grid.xi_max > 0.0)) throw ConfigError("xi_max", "velocity truncation must be positive");
    if (!(grid.r_min > 0.0)) throw ConfigError("r_min", "radius interval needs 0 < r_min");
    if (!(grid.r_max > grid.r_min)) throw ConfigError("r_max", "radius interval needs r_min < r_max");
    if (K < 0) throw ConfigError("K", "mode cutoff must be non-negative");
    if (grid.n_x < 4 * K) throw ConfigError("K", "n_x must be at least 4K so Galerkin products are exact");
    fluid.validate();

    if (kernel_type != "uniform_volume") throw ConfigError("type", "unknown kernel '" + kernel_type + "'");
    if (!(nu >= 0.0)) throw ConfigError("nu", "fragmentation rate must be non-negative");
    if (!(kernel_truncation > 0.0 && kernel_truncation <= 1.0)) throw ConfigError("truncation", "must lie in (0, 1]");

    if (std::find(kKinds.begin(), kKinds.end(), initial.kind) == kKinds.end())
        throw ConfigError("kind", "unknown initial condition '" + initial.kind + "'");
    if (!(initial.rho_mean > 0.0)) throw ConfigError("rho_mean", "mean density must be positive");
    if (!(std::abs(initial.rho_amplitude) < 1.0)) throw ConfigError("rho_amplitude", "density must stay positive");
    if (initial.rho_mode < 0 || 2 * initial.rho_mode >= grid.n_x) throw ConfigError("rho_mode", "mode not resolved");
    if (initial.u_mode < 0 || initial.u_mode > K) throw ConfigError("u_mode", "velocity mode exceeds K");
    if (!(initial.spray_amplitude >= 0.0)) throw ConfigError("spray_amplitude", "must be non-negative");
    if (!(std::abs(initial.spray_x_amplitude) <= 1.0)) throw ConfigError("spray_x_amplitude", "must lie in [-1, 1]");
    if (!(initial.xi_width > 0.0)) throw ConfigError("xi_width", "must be positive");
    if (!(initial.r_width >= 0.0)) throw ConfigError("r_width", "must be non-negative");
    if (!(initial.perturbation >= 0.0 && initial.perturbation < 0.5))
        throw ConfigError("perturbation", "must lie in [0, 0.5)");

    if (!(dt > 0.0)) throw ConfigError("dt", "time step must be positive");
    if (!(t_end > 0.0)) throw ConfigError("t_end", "end time must be positive");
    if (output_every < 1) throw ConfigError("output_every", "must be at least 1");
    if (checkpoint_every < 0) throw ConfigError("checkpoint_every", "must be non-negative");

    if (splitting != "strang" && splitting != "sequential") throw ConfigError("splitting", "strang or sequential");
    if (gain_rule != "midpoint" && gain_rule != "mass_conservative")
        throw ConfigError("gain_rule", "midpoint or mass_conservative");
    if (!(guard_tol > 0.0)) throw ConfigError("guard_tol", "tolerance must be positive");
    if (guard_cells < 0) throw ConfigError("guard_cells", "must be non-negative");

    if (!(tol_energy > 0.0)) throw ConfigError("energy", "tolerance must be positive");
    if (!(tol_fluid_mass > 0.0)) throw ConfigError("fluid_mass", "tolerance must be positive");
    if (!(tol_spray_mass > 0.0)) throw ConfigError("spray_mass", "tolerance must be positive");
    if (!(tol_momentum > 0.0)) throw ConfigError("momentum", "tolerance must be positive");
    if (!(tol_kernel > 0.0)) throw ConfigError("kernel", "tolerance must be positive");
    if (n_quad < 8) throw ConfigError("n_quad", "must be at least 8");
}

spectral::Basis SimConfig::basis() const { return spectral::Basis(grid.dim, K, grid.length, grid.n_x); }

kernel::BreakageKernel SimConfig::breakage_kernel() const {
    auto k = kernel::uniform_volume_kernel(nu, grid.r_min, grid.r_max);
    if (kernel_truncation < 1.0) k = kernel::truncated_kernel(k, kernel_truncation);
    return k;
}

coupling::SimParams SimConfig::sim_params() const {
    coupling::SimParams p;
    p.fluid = fluid;
    p.kinetic.guard_tol = guard_tol;
    p.kinetic.guard_cells = guard_cells;
    p.kinetic.moment_fix = moment_fix;
    p.kinetic.gain_rule = gain_rule == "midpoint" ? kernel::GainRule::midpoint : kernel::GainRule::mass_conservative;
    p.kernel = breakage_kernel();
    p.splitting = splitting == "sequential" ? coupling::Splitting::sequential : coupling::Splitting::strang;
    return p;
}

long SimConfig::step_count() const { return std::max(1L, std::lround(t_end / dt)); }

SimConfig parse_config_text(const std::string& text) {
    SimConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno), "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno), "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError(key, "key outside of any section");
        find_field(section, key).set(cfg, value);
    }
    cfg.validate();
    return cfg;
}

SimConfig parse_config_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("json", e.what());
    }
    if (!j.is_object()) throw ConfigError("json", "top level must be an object of sections");
    SimConfig cfg;
    for (const auto& [section, body] : j.items()) {
        if (!body.is_object()) throw ConfigError(section, "section must be an object");
        for (const auto& [key, value] : body.items()) {
            const auto& f = find_field(section, key);
            std::string v;
            if (value.is_string()) v = value.get<std::string>();
            else if (value.is_boolean()) v = value.get<bool>() ? "true" : "false";
            else if (value.is_number_integer()) v = std::to_string(value.get<long long>());
            else if (value.is_number()) v = fmt_double(value.get<double>());
            else throw ConfigError(key, "unsupported value type");
            f.set(cfg, v);
        }
    }
    cfg.validate();
    return cfg;
}

SimConfig parse_config(const std::string& text) {
    const auto b = text.find_first_not_of(" \t\r\n");
    if (b != std::string::npos && text[b] == '{') return parse_config_json(text);
    return parse_config_text(text);
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string echo_config(const SimConfig& cfg) {
    std::ostringstream out;
    std::string section;
    for (const auto& f : schema()) {
        if (section != f.section) {
            if (!section.empty()) out << '\n';
            section = f.section;
            out << '[' << section << "]\n";
        }
        out << f.key << " = " << f.get(cfg) << '\n';
    }
    return out.str();
}

std::string echo_config_json(const SimConfig& cfg) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& f : schema()) {
        const std::string v = f.get(cfg);
        auto& slot = j[f.section][f.key];
        switch (f.kind) {
            case Kind::number: slot = std::strtod(v.c_str(), nullptr); break;
            case Kind::integer: slot = std::strtoll(v.c_str(), nullptr, 10); break;
            case Kind::boolean: slot = (v == "true"); break;
            case Kind::text: slot = v; break;
        }
    }
    return j.dump(2);
}

}  // namespace nsvb::harness
