#pragma once

// Initial data and small helpers shared by the unit tests and the acceptance suite.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <span>

#include "polarity/diagnostics.hpp"
#include "polarity/grid.hpp"
#include "polarity/profiles.hpp"

namespace fixtures {

using namespace polarity;

/// exp(-(x + shift)^2 / 2) scaled to mass M; shift > 0 loads the left end.
inline Field shifted_gaussian(GridPtr grid, double M, double shift = 0.5) {
    Field f = gaussian_profile(std::move(grid), 1.0, shift);
    return f.scaled(M / mass(f));
}

/// The steep M = 2 profile used for the blow-up runs: smoothed indicator of [-1, -0.8].
inline Field steep_profile(GridPtr grid, double M = 2.0, double width = 0.2) {
    Field f = step_profile(std::move(grid), width);
    return f.scaled(M / mass(f));
}

/**
 * A e^{-beta x - x^2/2} (1 + eps cos(pi (x+1)/2)), with eps chosen so that
 * c(-1) - c(1) = beta. Such data satisfy the zero-flux condition of the
 * continuous problem at t = 0, so no boundary layer forms in the first steps.
 */
inline Field compatible_start(GridPtr grid, double M, double beta) {
    const auto make = [&](double eps) {
        Field f = Field::sample(grid, [&](double x) {
            return std::exp(-beta * x - 0.5 * x * x) * (1.0 + eps * std::cos(std::numbers::pi * (x + 1.0) / 2.0));
        });
        return f.scaled(M / mass(f));
    };
    double lo = -0.99, hi = 0.99;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (alpha_of(make(mid)) < beta ? lo : hi) = mid;
    }
    return make(0.5 * (lo + hi));
}

/// exp(b x + sum_k a_k cos(k pi (x+1)/2)), k = 1..4, scaled to mass M. Smooth and positive.
template <class Rng>
Field random_smooth_field(GridPtr grid, Rng& rng, double M) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    const double b = 2.0 * coef(rng);
    double a[4];
    for (int k = 0; k < 4; ++k) a[k] = coef(rng) / (k + 1);
    Field f = Field::sample(std::move(grid), [&](double x) {
        double s = b * x;
        for (int k = 0; k < 4; ++k) s += a[k] * std::cos((k + 1) * std::numbers::pi * (x + 1.0) / 2.0);
        return std::exp(s);
    });
    return f.scaled(M / mass(f));
}

/// A e^{-a x - x^2/2} with the discrete mass of M.
inline Field gamma_shaped(GridPtr grid, double a, double M) {
    Field f = Field::sample(std::move(grid), [a](double x) { return std::exp(-a * x - 0.5 * x * x); });
    return f.scaled(M / mass(f));
}

/// max_n |(J^{n+1} - J^n)/dt - ((1 - M) alpha^n - J^{n+1})| over consecutive records one step apart.
inline double max_moment_residual(std::span<const DiagnosticsRecord> traj, double dt, double M) {
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
        const auto& a = traj[k];
        const auto& b = traj[k + 1];
        worst = std::max(worst, std::abs((b.J - a.J) / dt - ((1.0 - M) * a.alpha - b.J)));
    }
    return worst;
}

}  // namespace fixtures
