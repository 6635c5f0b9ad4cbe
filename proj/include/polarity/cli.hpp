#pragma once

/**
 * @file cli.hpp
 * @brief Command-line front end:
 *   polarity-fp <simulate|stationary|sweep-alpha|phase> [--config PATH] [--out DIR] [--KEY VALUE ...]
 *
 * Values from --config are applied first, then every --KEY flag in table
 * order, so flags override the file.
 */

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "polarity/commands.hpp"
#include "polarity/config.hpp"

namespace polarity {

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Non-local Fokker-Planck polarity model: simulation, stationary states and sweeps", "polarity-fp"};
    app.require_subcommand(1);
    app.footer(config_key_help() + "\nExit codes: 0 completed, 2 blew up, 1 error.\n"
                                   "POLARITY_FP_WORKERS bounds the worker pool of 'phase'.");

    std::optional<std::string> config_path;
    std::optional<std::string> out_dir;
    std::map<std::string, std::optional<std::string>> flags;
    for (const auto& k : detail::key_table()) flags[k.key];

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "flat key = value config file");
        sub->add_option("--out", out_dir, "output directory (overrides out_dir)");
        for (const auto& k : detail::key_table()) {
            if (std::string_view(k.key) == "out_dir") continue;
            sub->add_option(std::string("--") + k.key, flags[k.key], k.help);
        }
    };
    CLI::App* simulate = app.add_subcommand("simulate", "run the direct or exchange model from an initial profile");
    CLI::App* stationary = app.add_subcommand("stationary", "write every stationary state for the given mass");
    CLI::App* sweep = app.add_subcommand("sweep-alpha", "tabulate M_alpha on a log grid of alpha");
    CLI::App* phase = app.add_subcommand("phase", "run a mass x asymmetry grid of simulations in parallel");
    for (CLI::App* sub : {simulate, stationary, sweep, phase}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitError;
    }

    try {
        RunConfig cfg = config_path ? load_config_file(*config_path) : RunConfig{};
        for (const auto& k : detail::key_table()) {
            if (const auto& v = flags[k.key]) apply_setting(cfg, k.key, *v, std::string("--") + k.key);
        }
        if (out_dir) apply_setting(cfg, "out_dir", *out_dir, "--out");

        if (simulate->parsed()) return cmd_simulate(cfg, out);
        if (stationary->parsed()) return cmd_stationary(cfg, out);
        if (sweep->parsed()) return cmd_sweep_alpha(cfg, out);
        if (phase->parsed()) return cmd_phase(cfg, out);
    } catch (const std::exception& e) {
        err << "polarity-fp: error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

}  // namespace polarity
