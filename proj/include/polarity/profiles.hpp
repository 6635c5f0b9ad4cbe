#pragma once

/**
 * @file profiles.hpp
 * @brief Built-in initial profiles, scaled to the configured mass.
 *
 *   gaussian_stationary    exp(-k (x + s)^2 / 2)       k = steepness, s = asymmetry
 *   asymmetric_stationary  G_{+-alpha} with M_alpha = M (sign of asymmetry, + by default)
 *   step                   (1 - tanh((x - (-1 + w)) / (w/10))) / 2,  w = steepness
 *   linear                 1 - a x                     a = asymmetry
 *   custom_csv             x,c snapshot, re-interpolated when the grids differ
 */

#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include "polarity/config.hpp"
#include "polarity/csv_io.hpp"
#include "polarity/exchange.hpp"
#include "polarity/stationary.hpp"

namespace polarity {

inline Field step_profile(GridPtr grid, double width) {
    const double edge = -1.0 + width;
    const double smoothing = width / 10.0;
    return Field::sample(std::move(grid), [&](double x) { return 0.5 * (1.0 - std::tanh((x - edge) / smoothing)); });
}

inline Field gaussian_profile(GridPtr grid, double steepness, double shift) {
    return Field::sample(std::move(grid), [&](double x) { return std::exp(-0.5 * steepness * (x + shift) * (x + shift)); });
}

/// Multiplies by 1 + eps * p(x), p a seeded cosine series with |p| <= 1.
inline Field perturbed(const Field& f, double eps, std::uint64_t seed) {
    if (eps == 0.0) return f;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-0.25, 0.25);
    double a[4];
    for (double& ak : a) ak = coef(rng);
    Field out = f;
    const auto x = f.grid().nodes();
    for (std::size_t i = 0; i < out.size(); ++i) {
        double p = 0.0;
        for (int k = 0; k < 4; ++k) p += a[k] * std::cos((k + 1) * std::numbers::pi * (x[i] + 1.0) / 2.0);
        out[i] *= 1.0 + eps * p;
    }
    return out;
}

/// Unscaled shape of the configured profile.
inline Field profile_shape(const RunConfig& cfg, GridPtr grid) {
    switch (cfg.profile) {
        case ProfileKind::gaussian_stationary: return gaussian_profile(std::move(grid), cfg.steepness, cfg.asymmetry);
        case ProfileKind::asymmetric_stationary: {
            const auto alpha = solve_alpha(cfg.mass, cfg.model);
            if (!alpha) {
                throw ConfigError("profile asymmetric_stationary: mass " + format_double(cfg.mass) +
                                  " admits no asymmetric state in the " + std::string(to_string(cfg.model)) + " model");
            }
            return asymmetric_profile(cfg.asymmetry < 0.0 ? -*alpha : *alpha, std::move(grid));
        }
        case ProfileKind::step: return step_profile(std::move(grid), cfg.steepness);
        case ProfileKind::linear: {
            const double a = cfg.asymmetry;
            return Field::sample(std::move(grid), [a](double x) { return 1.0 - a * x; });
        }
        case ProfileKind::custom_csv:
            return field_from_snapshot(parse_snapshot_csv(read_text_file(cfg.profile_csv)), std::move(grid));
    }
    throw ConfigError("unknown profile");
}

struct InitialCondition {
    Field field;                            ///< direct-model state, or the exchange interior
    std::optional<ExchangeState> exchange;  ///< set for the exchange model
};

/// Builds the configured initial condition. Throws ConfigError if it cannot be scaled to the requested mass.
inline InitialCondition build_initial(const RunConfig& cfg) {
    GridPtr grid = build_grid(cfg.n_cells);
    const Field shape = perturbed(profile_shape(cfg, grid), cfg.noise, cfg.seed);
    if (!shape.is_valid() || !(mass(shape) > 0.0)) {
        throw ConfigError("profile " + std::string(to_string(cfg.profile)) + ": shape must be non-negative with positive mass");
    }
    if (cfg.model == Model::direct) return {shape.scaled(cfg.mass / mass(shape)), std::nullopt};

    ExchangeState s;
    if (cfg.mu_left && cfg.mu_right) {
        const double free_mass = cfg.mass - *cfg.mu_left - *cfg.mu_right;
        if (!(free_mass > 0.0)) throw ConfigError("mu_left + mu_right must be smaller than mass");
        s = {shape.scaled(free_mass / mass(shape)), *cfg.mu_left, *cfg.mu_right};
    } else {
        s = exchange_state_with_total_mass(shape, cfg.mass);
    }
    return {s.interior, s};
}

}  // namespace polarity
