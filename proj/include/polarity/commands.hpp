#pragma once

/**
 * @file commands.hpp
 * @brief The polarity-fp subcommands and their on-disk outputs.
 *
 * Exit codes: 0 run completed, 2 run blew up, 1 any error (bad config,
 * I/O failure, solver failure). All files of a run are written before
 * manifest.json, which is renamed into place last.
 */

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "polarity/config.hpp"
#include "polarity/csv_io.hpp"
#include "polarity/dynamics.hpp"
#include "polarity/exchange.hpp"
#include "polarity/profiles.hpp"
#include "polarity/stationary.hpp"

namespace polarity {

inline constexpr const char* kVersion = "1.0.0";

inline constexpr int kExitCompleted = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitBlewUp = 2;

inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string utc_timestamp(std::chrono::system_clock::time_point tp) {
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// "snapshot_t0.5.csv", "snapshot_t4.csv", ...
inline std::string snapshot_name(double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "snapshot_t%.6g.csv", t);
    return buf;
}

/// Files written by one command, with the digests the manifest records.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

    const std::filesystem::path& dir() const { return dir_; }

    void write(const std::string& name, const std::string& content) {
        write_text_file((dir_ / name).string(), content);
        files_.push_back({{"name", name}, {"bytes", content.size()}, {"fnv1a64", hex64(fnv1a64(content))}});
    }

    const nlohmann::json& files() const { return files_; }

private:
    std::filesystem::path dir_;
    nlohmann::json files_ = nlohmann::json::array();
};

inline nlohmann::json config_json(const RunConfig& c) {
    const auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {{"model", to_string(c.model)},
            {"profile", to_string(c.profile)},
            {"mass", c.mass},
            {"steepness", c.steepness},
            {"asymmetry", c.asymmetry},
            {"noise", c.noise},
            {"profile_csv", c.profile_csv},
            {"n_cells", c.n_cells},
            {"dt", c.dt},
            {"t_end", c.t_end},
            {"record_every", c.record_every},
            {"blowup_alpha_threshold", opt(c.blowup_alpha_threshold)},
            {"blowup_supnorm_threshold", opt(c.blowup_supnorm_threshold)},
            {"snapshot_times", c.stepper().snapshot_times},
            {"mu_left", opt(c.mu_left)},
            {"mu_right", opt(c.mu_right)},
            {"k_d", c.k_d},
            {"delta", c.delta},
            {"gamma", c.gamma},
            {"d_prime", c.d_prime},
            {"seed", c.seed},
            {"out_dir", c.out_dir},
            {"alpha_min", c.alpha_min},
            {"alpha_max", c.alpha_max},
            {"points", c.points},
            {"mass_list", c.mass_list},
            {"asymmetry_list", c.asymmetry_list},
            {"phase_tolerance", c.phase_tolerance}};
}

/// Writes manifest.json through a temporary file and a rename.
inline void write_manifest(const std::filesystem::path& dir, const nlohmann::json& manifest) {
    const auto tmp = dir / "manifest.json.tmp";
    write_text_file(tmp.string(), manifest.dump(2) + "\n");
    std::filesystem::rename(tmp, dir / "manifest.json");
}

/// Runs the configured model from the configured initial profile.
inline SimOutcome run_configured(const RunConfig& cfg) {
    const InitialCondition init = build_initial(cfg);
    const StepperConfig stepper = cfg.stepper();
    const ModelParams params = cfg.model_params();
    if (init.exchange) return exchange_simulate(*init.exchange, stepper, params);
    return simulate(init.field, params, stepper);
}

inline int exit_code_for(SimStatus s) {
    switch (s) {
        case SimStatus::completed: return kExitCompleted;
        case SimStatus::blew_up: return kExitBlewUp;
        case SimStatus::integrity_failure: return kExitError;
    }
    return kExitError;
}

inline int cmd_simulate(const RunConfig& cfg, std::ostream& log = std::cout) {
    validate(cfg);
    const auto started = std::chrono::system_clock::now();
    const SimOutcome out = run_configured(cfg);

    OutputSet files(cfg.out_dir);
    files.write("trajectory.csv", trajectory_csv(out.trajectory, cfg.model == Model::exchange));
    for (const auto& snap : out.snapshots) files.write(snapshot_name(snap.t), snapshot_csv(snap.field));
    files.write("final.csv", snapshot_csv(out.final_state));

    nlohmann::json manifest = {
        {"tool", "polarity-fp"},
        {"version", kVersion},
        {"command", "simulate"},
        {"config", config_json(cfg)},
        {"started_at", utc_timestamp(started)},
        {"finished_at", utc_timestamp(std::chrono::system_clock::now())},
        {"status", to_string(out.status)},
        {"final_time", out.final_time},
        {"blowup_time", out.blowup_time ? nlohmann::json(*out.blowup_time) : nlohmann::json(nullptr)},
        {"message", out.message},
        {"files", files.files()},
    };
    write_manifest(files.dir(), manifest);

    log << "status=" << to_string(out.status) << " t=" << format_double(out.final_time);
    if (out.blowup_time) log << " blowup_time=" << format_double(*out.blowup_time);
    if (!out.message.empty()) log << " message=\"" << out.message << '"';
    log << '\n';
    return exit_code_for(out.status);
}

inline int cmd_stationary(const RunConfig& cfg, std::ostream& log = std::cout) {
    validate(cfg);
    const auto states = enumerate_states(cfg.mass, cfg.model, build_grid(cfg.n_cells));
    OutputSet files(cfg.out_dir);
    std::string alphas;
    for (const auto& s : states) {
        std::string name = "state_symmetric.csv";
        if (s.kind == StateKind::asymmetric) name = s.alpha > 0.0 ? "state_alpha_plus.csv" : "state_alpha_minus.csv";
        files.write(name, snapshot_csv(s.field));
        if (!alphas.empty()) alphas += ',';
        alphas += format_double(s.alpha);
    }
    log << "model=" << to_string(cfg.model) << " mass=" << format_double(cfg.mass) << " count=" << states.size()
        << " alphas=" << alphas << '\n';
    return kExitCompleted;
}

/// M_alpha on a log-spaced alpha grid.
inline std::string mass_curve_csv(Model model, double alpha_min, double alpha_max, std::size_t points) {
    if (!(alpha_min > 0.0) || !(alpha_min < alpha_max)) {
        throw ConfigError("sweep-alpha: need 0 < alpha_min < alpha_max");
    }
    if (points < 2) throw ConfigError("sweep-alpha: points must be >= 2");
    std::string out = "alpha,M_alpha\n";
    const double lo = std::log(alpha_min);
    const double hi = std::log(alpha_max);
    for (std::size_t k = 0; k < points; ++k) {
        double a = std::exp(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1));
        if (k == 0) a = alpha_min;
        if (k + 1 == points) a = alpha_max;
        out += format_double(a) + ',' + format_double(mass_of_alpha(a, model)) + '\n';
    }
    return out;
}

inline int cmd_sweep_alpha(const RunConfig& cfg, std::ostream& log = std::cout) {
    const std::string csv = mass_curve_csv(cfg.model, cfg.alpha_min, cfg.alpha_max, cfg.points);
    OutputSet files(cfg.out_dir);
    const std::string name = "mass_curve_" + std::string(to_string(cfg.model)) + ".csv";
    files.write(name, csv);
    log << "wrote " << (files.dir() / name).string() << " (" << cfg.points << " points)\n";
    return kExitCompleted;
}

struct PhaseCell {
    double mass = 0.0;
    double asymmetry = 0.0;
    std::string outcome = "error";
    double final_alpha = kNaN;
    std::optional<double> blowup_time;
    std::string message;
};

/// Runs one (M, asymmetry) cell and classifies the result.
inline PhaseCell run_phase_cell(RunConfig cfg, double M, double asym) {
    PhaseCell cell{M, asym};
    cfg.mass = M;
    cfg.asymmetry = asym;
    try {
        validate(cfg);
        const SimOutcome out = run_configured(cfg);
        cell.final_alpha = out.trajectory.empty() ? kNaN : out.trajectory.back().alpha;
        cell.blowup_time = out.blowup_time;
        cell.message = out.message;
        if (out.status == SimStatus::blew_up) {
            cell.outcome = "blew_up";
        } else if (out.status == SimStatus::completed) {
            const Field sym = symmetric_state(M, cfg.model, out.final_state.grid_ptr()).field;
            const bool near = l1_distance(out.final_state, sym) <= cfg.phase_tolerance * M;
            cell.outcome = near ? "converged_symmetric" : "asymmetric";
        }
    } catch (const std::exception& e) {
        cell.outcome = "error";
        cell.message = e.what();
    }
    return cell;
}

/// Worker count: POLARITY_FP_WORKERS if set and positive, else hardware concurrency; never above `jobs`.
inline std::size_t phase_workers(std::size_t jobs) {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("POLARITY_FP_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) n = static_cast<std::size_t>(v);
    }
    return std::max<std::size_t>(1, std::min(n, jobs));
}

inline std::vector<PhaseCell> run_phase(const RunConfig& cfg) {
    if (cfg.mass_list.empty()) throw ConfigError("phase: mass_list must not be empty");
    if (cfg.asymmetry_list.empty()) throw ConfigError("phase: asymmetry_list must not be empty");
    std::vector<PhaseCell> cells(cfg.mass_list.size() * cfg.asymmetry_list.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t k = next++; k < cells.size(); k = next++) {
            const double M = cfg.mass_list[k / cfg.asymmetry_list.size()];
            const double a = cfg.asymmetry_list[k % cfg.asymmetry_list.size()];
            cells[k] = run_phase_cell(cfg, M, a);
        }
    };
    std::vector<std::thread> pool;
    const std::size_t n = phase_workers(cells.size());
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return cells;
}

inline std::string phase_csv(const std::vector<PhaseCell>& cells) {
    std::string out = "M,asym,outcome,final_alpha,blowup_time\n";
    for (const auto& c : cells) {
        out += format_double(c.mass) + ',' + format_double(c.asymmetry) + ',' + c.outcome + ',' +
               format_double(c.final_alpha) + ',' + (c.blowup_time ? format_double(*c.blowup_time) : "") + '\n';
    }
    return out;
}

inline int cmd_phase(const RunConfig& cfg, std::ostream& log = std::cout) {
    const auto started = std::chrono::system_clock::now();
    const auto cells = run_phase(cfg);
    OutputSet files(cfg.out_dir);
    files.write("phase.csv", phase_csv(cells));

    nlohmann::json errors = nlohmann::json::array();
    for (const auto& c : cells) {
        if (c.outcome == "error") errors.push_back({{"M", c.mass}, {"asym", c.asymmetry}, {"message", c.message}});
    }
    write_manifest(files.dir(), {{"tool", "polarity-fp"},
                                 {"version", kVersion},
                                 {"command", "phase"},
                                 {"config", config_json(cfg)},
                                 {"started_at", utc_timestamp(started)},
                                 {"finished_at", utc_timestamp(std::chrono::system_clock::now())},
                                 {"status", "completed"},
                                 {"cell_errors", errors},
                                 {"files", files.files()}});
    log << "phase: " << cells.size() << " cells, " << errors.size() << " errors\n";
    return kExitCompleted;
}

}  // namespace polarity
