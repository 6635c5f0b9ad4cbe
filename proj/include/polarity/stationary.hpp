#pragma once

/**
 * @file stationary.hpp
 * @brief Closed-form stationary states, the mass-vs-alpha curves and
 *        root finding for the asymmetric states of both models.
 *
 * Every stationary profile has the form  A exp(-alpha x - x^2/2).
 * Symmetric states (alpha = 0) exist for every mass. Asymmetric states
 *
 *     G_alpha(x) = alpha / (1 - exp(-2 alpha)) * exp(-alpha (x+1) - (x^2-1)/2)
 *
 * satisfy the self-consistency G_alpha(-1) - G_alpha(1) = alpha identically,
 * and exist only when the requested mass lies in the attainable set of the
 * curve alpha -> M_alpha:
 *
 *   direct:    M_alpha = int G_alpha
 *   exchange:  M_alpha = int G_alpha + G_alpha(-1) + G_alpha(1)
 *              (the boundary-bound masses equal the traces at equilibrium)
 */

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarity/grid.hpp"
#include "polarity/model.hpp"
#include "polarity/quadrature.hpp"
#include "polarity/tridiagonal.hpp"

namespace polarity {

/// alpha / (1 - exp(-2 alpha)), with its series 1/2 + alpha/2 near zero.
inline double alpha_factor(double alpha) {
    if (std::abs(alpha) < 1e-8) return 0.5 + 0.5 * alpha;
    return alpha / -std::expm1(-2.0 * alpha);
}

/// G_alpha(x). Negative alpha is evaluated through G_alpha(x) = G_{-alpha}(-x) to avoid overflow.
inline double asymmetric_value(double alpha, double x) {
    const double gauss = -0.5 * (x * x - 1.0);
    if (alpha >= 0.0) return alpha_factor(alpha) * std::exp(-alpha * (x + 1.0) + gauss);
    const double beta = -alpha;
    return alpha_factor(beta) * std::exp(-beta * (1.0 - x) + gauss);
}

/// int_{-1}^{1} exp(-alpha y - y^2/2) dy.
inline double gaussian_partition(double alpha) {
    return integrate_adaptive([alpha](double y) { return std::exp(-alpha * y - 0.5 * y * y); }, -1.0, 1.0);
}

/// Critical mass M_0: the alpha -> 0 limit of M_alpha.
/// direct: (1/2) int exp(-(x^2-1)/2); exchange: 1 + the same.
inline double critical_mass(Model model) {
    const double half_integral =
        0.5 * integrate_adaptive([](double x) { return std::exp(-0.5 * (x * x - 1.0)); }, -1.0, 1.0);
    return model == Model::direct ? half_integral : 1.0 + half_integral;
}

inline double mass_of_alpha(double alpha, Model model) {
    if (alpha == 0.0) return critical_mass(model);
    const double interior = integrate_adaptive([alpha](double x) { return asymmetric_value(alpha, x); }, -1.0, 1.0);
    if (model == Model::direct) return interior;
    return interior + asymmetric_value(alpha, -1.0) + asymmetric_value(alpha, 1.0);
}

/// Sampled G_alpha; alpha must be non-zero (the symmetric limit belongs to symmetric_state).
inline Field asymmetric_profile(double alpha, GridPtr grid) {
    if (alpha == 0.0 || !std::isfinite(alpha)) {
        throw std::invalid_argument("asymmetric_profile: alpha must be finite and non-zero");
    }
    return Field::sample(std::move(grid), [alpha](double x) { return asymmetric_value(alpha, x); });
}

enum class StateKind { symmetric, asymmetric };

struct StationaryState {
    StateKind kind = StateKind::symmetric;
    double alpha = 0.0;
    Model model = Model::direct;
    Field field;
    double mass = 0.0;
};

/**
 * Symmetric stationary state of total mass M, normalized with the grid's own
 * quadrature so that the discrete mass is exactly M:
 *   direct:    sum w_i c_i = M
 *   exchange:  sum w_i c_i + c(-1) + c(1) = M
 */
inline StationaryState symmetric_state(double M, Model model, GridPtr grid) {
    if (!(M > 0.0) || !std::isfinite(M)) throw std::invalid_argument("symmetric_state: mass must be positive");
    Field shape = Field::sample(std::move(grid), [](double x) { return std::exp(-0.5 * (x * x - 1.0)); });
    double normalizer = mass(shape);
    if (model == Model::exchange) normalizer += shape.front() + shape.back();
    return {StateKind::symmetric, 0.0, model, shape.scaled(M / normalizer), M};
}

struct AlphaSearch {
    std::optional<double> alpha;  ///< positive root in the first bracket, if any
    std::size_t brackets = 0;     ///< sign changes found on the scan grid
};

struct AlphaSearchOptions {
    double alpha_min = 1e-4;
    double alpha_max = 1e3;
    std::size_t scan_points = 400;
    double tolerance = 1e-10;
    std::size_t max_iterations = 200;
};

/**
 * Solves M_alpha = M over alpha > 0. The scan does not assume M_alpha is
 * monotone: it reports every bracket and refines the first one by bisection.
 * Throws SolverError if bisection hits the iteration cap.
 */
inline AlphaSearch solve_alpha_detailed(double M, Model model, const AlphaSearchOptions& opt = {}) {
    if (!(M > 0.0)) throw std::invalid_argument("solve_alpha: mass must be positive");
    AlphaSearch result;
    const double log_lo = std::log(opt.alpha_min);
    const double log_hi = std::log(opt.alpha_max);
    const auto alpha_at = [&](std::size_t k) {
        if (k == 0) return opt.alpha_min;
        if (k == opt.scan_points) return opt.alpha_max;
        return std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(k) / static_cast<double>(opt.scan_points));
    };
    const auto residual = [&](double a) { return mass_of_alpha(a, model) - M; };

    double a_prev = alpha_at(0);
    double r_prev = residual(a_prev);
    std::optional<std::pair<double, double>> first;
    for (std::size_t k = 1; k <= opt.scan_points; ++k) {
        const double a = alpha_at(k);
        const double r = residual(a);
        if (r_prev == 0.0 || (r_prev < 0.0) != (r < 0.0)) {
            ++result.brackets;
            if (!first) first = {a_prev, a};
        }
        a_prev = a;
        r_prev = r;
    }
    if (!first) return result;

    auto [lo, hi] = *first;
    double r_lo = residual(lo);
    if (r_lo == 0.0) {
        result.alpha = lo;
        return result;
    }
    for (std::size_t it = 0; it < opt.max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= opt.tolerance) {
            result.alpha = mid;
            return result;
        }
        const double r_mid = residual(mid);
        if (r_mid == 0.0) {
            result.alpha = mid;
            return result;
        }
        if ((r_mid < 0.0) == (r_lo < 0.0)) {
            lo = mid;
            r_lo = r_mid;
        } else {
            hi = mid;
        }
    }
    throw SolverError("solve_alpha: bisection did not converge for M = " + std::to_string(M));
}

inline std::optional<double> solve_alpha(double M, Model model) { return solve_alpha_detailed(M, model).alpha; }

/// The symmetric state, followed by G_{+alpha} and G_{-alpha} when the mass is attainable.
inline std::vector<StationaryState> enumerate_states(double M, Model model, const GridPtr& grid) {
    std::vector<StationaryState> states;
    states.push_back(symmetric_state(M, model, grid));
    if (const auto alpha = solve_alpha(M, model)) {
        for (double a : {*alpha, -*alpha}) {
            states.push_back({StateKind::asymmetric, a, model, asymmetric_profile(a, grid), M});
        }
    }
    return states;
}

}  // namespace polarity
