#pragma once

/**
 * @file config.hpp
 * @brief Flat "key = value" run configuration.
 *
 * Grammar: one assignment per line, '#' starts a comment, blank lines are
 * ignored, keys are case-sensitive and may appear at most once per source.
 * Lists are comma separated. Every error names the source and line, or the
 * command-line flag, that produced it.
 */

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polarity/dynamics.hpp"
#include "polarity/model.hpp"

namespace polarity {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ProfileKind { gaussian_stationary, asymmetric_stationary, step, linear, custom_csv };

inline std::string_view to_string(ProfileKind p) {
    switch (p) {
        case ProfileKind::gaussian_stationary: return "gaussian_stationary";
        case ProfileKind::asymmetric_stationary: return "asymmetric_stationary";
        case ProfileKind::step: return "step";
        case ProfileKind::linear: return "linear";
        case ProfileKind::custom_csv: return "custom_csv";
    }
    return "unknown";
}

inline ProfileKind parse_profile(std::string_view s) {
    for (auto p : {ProfileKind::gaussian_stationary, ProfileKind::asymmetric_stationary, ProfileKind::step,
                   ProfileKind::linear, ProfileKind::custom_csv}) {
        if (s == to_string(p)) return p;
    }
    throw std::invalid_argument("unknown profile '" + std::string(s) +
                                "' (expected gaussian_stationary, asymmetric_stationary, step, linear or custom_csv)");
}

struct RunConfig {
    Model model = Model::direct;
    ProfileKind profile = ProfileKind::gaussian_stationary;
    double mass = 0.8;
    double steepness = 1.0;
    double asymmetry = 0.0;
    double noise = 0.0;
    std::string profile_csv;
    std::size_t n_cells = 1000;

    double dt = 1e-2;
    double t_end = 4.0;
    std::size_t record_every = 1;
    std::optional<double> blowup_alpha_threshold;
    std::optional<double> blowup_supnorm_threshold;
    std::vector<double> snapshot_times;
    std::optional<double> mu_left;
    std::optional<double> mu_right;

    double k_d = 1.0;
    double delta = 1.0;
    double gamma = 0.5;
    double d_prime = 1.0;

    std::uint64_t seed = 0;
    std::string out_dir = "out";

    double alpha_min = 1e-3;
    double alpha_max = 10.0;
    std::size_t points = 200;
    std::vector<double> mass_list;
    std::vector<double> asymmetry_list;
    double phase_tolerance = 0.05;

    /// Every assignment that was applied, in order, as (key, raw value).
    std::vector<std::pair<std::string, std::string>> echo;
    /// Where each key was last set ("file.cfg:12" or "--mass").
    std::map<std::string, std::string> origin;

    ModelParams model_params() const { return ModelParams::from_physical(k_d, delta, gamma, d_prime); }

    StepperConfig stepper() const {
        StepperConfig s;
        s.dt = dt;
        s.t_end = t_end;
        s.record_every = record_every;
        s.blowup_alpha_threshold = blowup_alpha_threshold;
        s.blowup_supnorm_threshold = blowup_supnorm_threshold;
        s.snapshot_times = snapshot_times.empty() ? std::vector<double>{0.0, t_end} : snapshot_times;
        return s;
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& v) {
    if (v.empty()) throw std::invalid_argument("expected a number, got an empty value");
    errno = 0;
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size()) throw std::invalid_argument("expected a number, got '" + v + "'");
    if (errno == ERANGE || !std::isfinite(d)) throw std::invalid_argument("number out of range: '" + v + "'");
    return d;
}

/// Integers accept scientific notation ("1e3") as long as the value is integral.
inline std::uint64_t parse_count(const std::string& v) {
    const double d = parse_double(v);
    if (d < 0.0 || d != std::floor(d) || d > 9.0e15) {
        throw std::invalid_argument("expected a non-negative integer, got '" + v + "'");
    }
    return static_cast<std::uint64_t>(d);
}

inline std::vector<double> parse_list(const std::string& v) {
    std::vector<double> out;
    if (trim(v).empty()) return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item)));
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

struct KeySpec {
    const char* key;
    const char* help;
    Setter set;
};

inline const std::vector<KeySpec>& key_table() {
    static const std::vector<KeySpec> table = {
        {"model", "direct | exchange", [](RunConfig& c, const std::string& v) { c.model = parse_model(v); }},
        {"profile", "gaussian_stationary | asymmetric_stationary | step | linear | custom_csv",
         [](RunConfig& c, const std::string& v) { c.profile = parse_profile(v); }},
        {"mass", "total mass M (exchange: includes the boundary-bound masses)",
         [](RunConfig& c, const std::string& v) { c.mass = parse_double(v); }},
        {"steepness", "gaussian: curvature k; step: plateau width w",
         [](RunConfig& c, const std::string& v) { c.steepness = parse_double(v); }},
        {"asymmetry", "gaussian: centre shift toward x=-1; linear: slope a in 1 - a x; asymmetric_stationary: sign",
         [](RunConfig& c, const std::string& v) { c.asymmetry = parse_double(v); }},
        {"noise", "relative amplitude of a seeded smooth perturbation of the initial profile",
         [](RunConfig& c, const std::string& v) { c.noise = parse_double(v); }},
        {"profile_csv", "path of an x,c snapshot for profile = custom_csv",
         [](RunConfig& c, const std::string& v) { c.profile_csv = v; }},
        {"n_cells", "number of grid cells (even, >= 4)",
         [](RunConfig& c, const std::string& v) { c.n_cells = parse_count(v); }},
        {"dt", "time step", [](RunConfig& c, const std::string& v) { c.dt = parse_double(v); }},
        {"t_end", "final time", [](RunConfig& c, const std::string& v) { c.t_end = parse_double(v); }},
        {"record_every", "record diagnostics every k steps",
         [](RunConfig& c, const std::string& v) { c.record_every = parse_count(v); }},
        {"blowup_alpha_threshold", "|alpha| trigger (default 1/dx)",
         [](RunConfig& c, const std::string& v) { c.blowup_alpha_threshold = parse_double(v); }},
        {"blowup_supnorm_threshold", "max-value trigger (default 10 M/dx)",
         [](RunConfig& c, const std::string& v) { c.blowup_supnorm_threshold = parse_double(v); }},
        {"snapshot_times", "comma-separated snapshot times (default 0,t_end)",
         [](RunConfig& c, const std::string& v) { c.snapshot_times = parse_list(v); }},
        {"mu_left", "exchange: initial mu_- (default c0(-1))",
         [](RunConfig& c, const std::string& v) { c.mu_left = parse_double(v); }},
        {"mu_right", "exchange: initial mu_+ (default c0(1))",
         [](RunConfig& c, const std::string& v) { c.mu_right = parse_double(v); }},
        {"k_d", "depolymerization rate", [](RunConfig& c, const std::string& v) { c.k_d = parse_double(v); }},
        {"delta", "coupling strength", [](RunConfig& c, const std::string& v) { c.delta = parse_double(v); }},
        {"gamma", "friction coefficient", [](RunConfig& c, const std::string& v) { c.gamma = parse_double(v); }},
        {"d_prime", "diffusivity", [](RunConfig& c, const std::string& v) { c.d_prime = parse_double(v); }},
        {"seed", "seed for the noise perturbation",
         [](RunConfig& c, const std::string& v) { c.seed = parse_count(v); }},
        {"out_dir", "output directory", [](RunConfig& c, const std::string& v) { c.out_dir = v; }},
        {"alpha_min", "sweep-alpha: lower end of the log grid",
         [](RunConfig& c, const std::string& v) { c.alpha_min = parse_double(v); }},
        {"alpha_max", "sweep-alpha: upper end of the log grid",
         [](RunConfig& c, const std::string& v) { c.alpha_max = parse_double(v); }},
        {"points", "sweep-alpha: number of grid points",
         [](RunConfig& c, const std::string& v) { c.points = parse_count(v); }},
        {"mass_list", "phase: comma-separated masses",
         [](RunConfig& c, const std::string& v) { c.mass_list = parse_list(v); }},
        {"asymmetry_list", "phase: comma-separated asymmetry values",
         [](RunConfig& c, const std::string& v) { c.asymmetry_list = parse_list(v); }},
        {"phase_tolerance", "phase: relative L1 distance to G_M counted as converged",
         [](RunConfig& c, const std::string& v) { c.phase_tolerance = parse_double(v); }},
    };
    return table;
}

inline const KeySpec* find_key(std::string_view key) {
    for (const auto& k : key_table()) {
        if (key == k.key) return &k;
    }
    return nullptr;
}

}  // namespace detail

/// Applies one assignment; `where` prefixes any error message.
inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value, const std::string& where) {
    const auto* spec = detail::find_key(key);
    if (!spec) throw ConfigError(where + ": unknown key '" + key + "'");
    try {
        spec->set(cfg, value);
    } catch (const std::exception& e) {
        throw ConfigError(where + ": key '" + key + "': " + e.what());
    }
    cfg.echo.emplace_back(key, value);
    cfg.origin[key] = where;
}

/// Parses config text into `cfg` (defaults are kept for keys not mentioned).
inline void parse_config_text(RunConfig& cfg, const std::string& text, const std::string& source = "config") {
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    std::map<std::string, std::size_t> seen;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string where = source + ":" + std::to_string(lineno);
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = detail::trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = detail::trim(std::string_view(body).substr(0, eq));
        const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": missing key before '='");
        if (const auto it = seen.find(key); it != seen.end()) {
            throw ConfigError(where + ": key '" + key + "' already set on line " + std::to_string(it->second));
        }
        seen[key] = lineno;
        apply_setting(cfg, key, value, where);
    }
}

inline RunConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << is.rdbuf();
    RunConfig cfg;
    parse_config_text(cfg, ss.str(), path);
    return cfg;
}

/// Field-level validation; messages cite where the offending key was set.
inline void validate(const RunConfig& c) {
    const auto fail = [&](const std::string& key, const std::string& msg) {
        const auto it = c.origin.find(key);
        const std::string where = it == c.origin.end() ? "default" : it->second;
        throw ConfigError(where + ": key '" + key + "': " + msg);
    };
    if (!(c.mass > 0.0)) fail("mass", "must be > 0");
    if (c.n_cells < 4 || c.n_cells % 2 != 0) fail("n_cells", "must be even and >= 4");
    if (!(c.dt > 0.0)) fail("dt", "must be > 0");
    if (!(c.t_end >= 0.0)) fail("t_end", "must be >= 0");
    if (c.record_every == 0) fail("record_every", "must be >= 1");
    if (c.blowup_alpha_threshold && !(*c.blowup_alpha_threshold > 0.0)) fail("blowup_alpha_threshold", "must be > 0");
    if (c.blowup_supnorm_threshold && !(*c.blowup_supnorm_threshold > 0.0)) {
        fail("blowup_supnorm_threshold", "must be > 0");
    }
    for (double t : c.snapshot_times) {
        if (t < 0.0 || t > c.t_end) fail("snapshot_times", "every time must lie in [0, t_end]");
    }
    if (c.mu_left && !(*c.mu_left >= 0.0)) fail("mu_left", "must be >= 0");
    if (c.mu_right && !(*c.mu_right >= 0.0)) fail("mu_right", "must be >= 0");
    if (c.mu_left.has_value() != c.mu_right.has_value()) fail(c.mu_left ? "mu_right" : "mu_left", "set both or neither");
    if (c.profile == ProfileKind::step && !(c.steepness > 0.0 && c.steepness <= 2.0)) {
        fail("steepness", "step width must lie in (0, 2]");
    }
    if (c.profile == ProfileKind::gaussian_stationary && !(c.steepness > 0.0)) fail("steepness", "must be > 0");
    if (c.profile == ProfileKind::linear && !(std::abs(c.asymmetry) <= 1.0)) {
        fail("asymmetry", "linear slope must satisfy |a| <= 1 to stay non-negative");
    }
    if (c.profile == ProfileKind::custom_csv && c.profile_csv.empty()) fail("profile_csv", "required for custom_csv");
    if (!(c.noise >= 0.0 && c.noise < 1.0)) fail("noise", "must lie in [0, 1)");
    if (!(c.d_prime > 0.0)) fail("d_prime", "must be > 0");
    if (!(c.k_d >= 0.0)) fail("k_d", "must be >= 0");
    if (!(c.delta * c.gamma + c.delta / 2.0 >= 0.0)) fail("delta", "drift prefactor delta*gamma + delta/2 must be >= 0");
    if (c.out_dir.empty()) fail("out_dir", "must not be empty");
    if (!(c.phase_tolerance > 0.0)) fail("phase_tolerance", "must be > 0");
}

/// Help text listing every key, used by --help.
inline std::string config_key_help() {
    std::string out = "Config keys (file lines 'key = value', or --key VALUE on the command line):\n";
    for (const auto& k : detail::key_table()) {
        out += "  ";
        out += k.key;
        out += std::string(26 - std::min<std::size_t>(25, std::string_view(k.key).size()), ' ');
        out += k.help;
        out += '\n';
    }
    return out;
}

}  // namespace polarity
