#pragma once

/**
 * @file diagnostics.hpp
 * @brief Entropy-method functionals evaluated on nodal snapshots.
 *
 *   H(u|v)  = int u log(u/v)                      relative entropy
 *   I(u|v)  = int u (d/dx log(u/v))^2             Fisher information
 *   Gamma_c = A_c exp(-alpha x - x^2/2),  mass(Gamma_c) = mass(c)
 *   L       = H(c|G_M) + J^2 / (2(1-M))           (M < 1)
 *   D       = I(c|Gamma_c) + ((1-M) alpha - J)^2 / (1-M)
 *
 * All integrals use the trapezoid weights of the grid, and Gamma_c and G_M
 * are normalized with the same weights, so the decomposition
 *   H(c|G_M) = H(c|Gamma_c) + M log(Z_0 / Z_alpha) - alpha J
 * holds to rounding error when Z is the discrete partition sum.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "polarity/grid.hpp"
#include "polarity/stationary.hpp"

namespace polarity {

/// Floor applied to u before taking logarithms in the Fisher information.
inline constexpr double kPositivityFloor = 1e-300;

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Masses within this relative distance of 1 count as critical: L and D have a 1/(1-M) factor.
inline constexpr double kCriticalMassSlack = 1e-12;

inline bool strictly_subcritical(double M) { return M < 1.0 - kCriticalMassSlack; }

namespace detail {

inline void require_same_grid(const Field& u, const Field& v, const char* what) {
    if (!u.same_grid(v)) throw std::invalid_argument(std::string(what) + ": fields live on different grids");
}

inline void require_positive(const Field& v, const char* what) {
    for (double x : v.values()) {
        if (!(x > 0.0)) throw std::invalid_argument(std::string(what) + ": reference field has a non-positive node");
    }
}

inline void require_equal_mass(double a, double b, const char* what) {
    if (std::abs(a - b) > 1e-8 * std::max(1.0, std::max(std::abs(a), std::abs(b)))) {
        throw std::invalid_argument(std::string(what) + ": masses differ (" + std::to_string(a) + " vs " +
                                    std::to_string(b) + ")");
    }
}

inline std::vector<double> log_values(const Field& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::log(v[i]);
    return out;
}

inline double relative_entropy_log(const Field& u, std::span<const double> log_v) {
    const auto w = u.grid().weights();
    CompensatedSum s;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] > 0.0) s.add(w[i] * u[i] * (std::log(u[i]) - log_v[i]));
    }
    return s.value();
}

inline double fisher_information_log(const Field& u, std::span<const double> log_v, std::size_t* clamp_events) {
    const std::size_t n = u.size();
    const double dx = u.grid().dx();
    std::vector<double> log_ratio(n);
    std::size_t clamped = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double ui = u[i];
        if (std::isnan(ui)) throw std::invalid_argument("fisher_information: NaN in u");
        if (!(ui >= kPositivityFloor)) {
            ui = kPositivityFloor;
            ++clamped;
        }
        log_ratio[i] = std::log(ui) - log_v[i];
    }
    if (clamp_events) *clamp_events += clamped;

    const auto w = u.grid().weights();
    CompensatedSum s;
    for (std::size_t i = 0; i < n; ++i) {
        double grad;
        if (i == 0) {
            grad = (-3.0 * log_ratio[0] + 4.0 * log_ratio[1] - log_ratio[2]) / (2.0 * dx);
        } else if (i == n - 1) {
            grad = (3.0 * log_ratio[n - 1] - 4.0 * log_ratio[n - 2] + log_ratio[n - 3]) / (2.0 * dx);
        } else {
            grad = (log_ratio[i + 1] - log_ratio[i - 1]) / (2.0 * dx);
        }
        s.add(w[i] * std::max(u[i], 0.0) * grad * grad);
    }
    return s.value();
}

}  // namespace detail

/// H(u|v) with 0 log 0 = 0. Requires v > 0 at every node.
inline double relative_entropy(const Field& u, const Field& v) {
    detail::require_same_grid(u, v, "relative_entropy");
    detail::require_positive(v, "relative_entropy");
    return detail::relative_entropy_log(u, detail::log_values(v));
}

/**
 * I(u|v). The gradient of log(u/v) is taken on log-values: central differences
 * inside, second-order one-sided at x = -1 and x = 1. Nodes with u below
 * kPositivityFloor are clamped; their count is added to *clamp_events.
 */
inline double fisher_information(const Field& u, const Field& v, std::size_t* clamp_events = nullptr) {
    detail::require_same_grid(u, v, "fisher_information");
    detail::require_positive(v, "fisher_information");
    return detail::fisher_information_log(u, detail::log_values(v), clamp_events);
}

/// log of the discrete partition sum  sum_i w_i exp(-alpha x_i - x_i^2/2), overflow-safe.
inline double log_discrete_partition(const Grid& grid, double alpha) {
    const auto x = grid.nodes();
    const auto w = grid.weights();
    double peak = -std::numeric_limits<double>::infinity();
    for (double xi : x) peak = std::max(peak, -alpha * xi - 0.5 * xi * xi);
    CompensatedSum s;
    for (std::size_t i = 0; i < x.size(); ++i) s.add(w[i] * std::exp(-alpha * x[i] - 0.5 * x[i] * x[i] - peak));
    return peak + std::log(s.value());
}

namespace detail {

/// log Gamma_c at the nodes; finite even where Gamma_c itself underflows.
inline std::vector<double> log_gamma_c(const Field& f) {
    const double M = mass(f);
    if (!(M > 0.0)) throw std::invalid_argument("gamma_c: field must have positive mass");
    const double alpha = alpha_of(f);
    const double log_amp = std::log(M) - log_discrete_partition(f.grid(), alpha);
    const auto x = f.grid().nodes();
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = log_amp - alpha * x[i] - 0.5 * x[i] * x[i];
    return out;
}

}  // namespace detail

/// Gamma_c = A_c exp(-alpha x - x^2/2) with alpha = c(-1) - c(1) and discrete mass equal to mass(f).
inline Field gamma_c(const Field& f) {
    const auto log_g = detail::log_gamma_c(f);
    Field out(f.grid_ptr());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(log_g[i]);
    return out;
}

/// Equilibrium of the direct model with the field's own mass.
inline Field equilibrium_of(const Field& f) { return symmetric_state(mass(f), Model::direct, f.grid_ptr()).field; }

/// L = H(c|G_M) + J^2 / (2(1-M)); defined only for M < 1.
inline double lyapunov(const Field& f) {
    const double M = mass(f);
    if (!strictly_subcritical(M)) throw std::domain_error("lyapunov: defined only for mass < 1 (got " + std::to_string(M) + ")");
    const double J = first_moment(f);
    return relative_entropy(f, equilibrium_of(f)) + J * J / (2.0 * (1.0 - M));
}

/// D = I(c|Gamma_c) + ((c(-1)-c(1))(1-M) - J)^2 / (1-M); defined only for M < 1.
inline double dissipation(const Field& f, std::size_t* clamp_events = nullptr) {
    const double M = mass(f);
    if (!strictly_subcritical(M)) throw std::domain_error("dissipation: defined only for mass < 1 (got " + std::to_string(M) + ")");
    const double J = first_moment(f);
    const double gap = alpha_of(f) * (1.0 - M) - J;
    return detail::fisher_information_log(f, detail::log_gamma_c(f), clamp_events) + gap * gap / (1.0 - M);
}

struct InequalitySides {
    double lhs;
    double rhs;
};

/// Csiszar-Kullback: (||f-g||_1^2, 2M H(f|g)); lhs <= rhs for equal masses.
inline InequalitySides ck_gap(const Field& f, const Field& g) {
    const double M = mass(f);
    detail::require_equal_mass(M, mass(g), "ck_gap");
    const double l1 = l1_distance(f, g);
    return {l1 * l1, 2.0 * M * relative_entropy(f, g)};
}

/// Log-Sobolev: (H(u|nu), I(u|nu)/2); lhs <= rhs when nu = exp(-V) with V'' >= 1 and equal masses.
inline InequalitySides lsi_gap(const Field& u, const Field& nu) {
    detail::require_equal_mass(mass(u), mass(nu), "lsi_gap");
    return {relative_entropy(u, nu), 0.5 * fisher_information(u, nu)};
}

/// Terms of H(c|G_M) = H(c|Gamma_c) + M log(Z_0/Z_alpha) - alpha J.
struct EntropyDecomposition {
    double entropy_vs_equilibrium;  ///< H(c|G_M)
    double entropy_vs_gamma;        ///< H(c|Gamma_c)
    double partition_term;          ///< M log(Z_0 / Z_alpha)
    double drift_term;              ///< alpha J

    double residual() const { return entropy_vs_equilibrium - (entropy_vs_gamma + partition_term - drift_term); }
};

inline EntropyDecomposition entropy_decomposition(const Field& f) {
    const double M = mass(f);
    const double alpha = alpha_of(f);
    const double log_ratio = log_discrete_partition(f.grid(), 0.0) - log_discrete_partition(f.grid(), alpha);
    return {relative_entropy(f, equilibrium_of(f)), detail::relative_entropy_log(f, detail::log_gamma_c(f)),
            M * log_ratio, alpha * first_moment(f)};
}

/// One time sample of the observables. Fields that do not apply are NaN.
struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    double J = 0.0;
    double J_shift = 0.0;
    double alpha = 0.0;  ///< drift coefficient: c(-1)-c(1) (direct) or mu_- - mu_+ (exchange)
    double c_left = 0.0;
    double c_right = 0.0;
    double entropy = kNaN;      ///< H(c|G_m), m = mass of c
    double fisher = kNaN;       ///< I(c|Gamma_c)
    double lyapunov = kNaN;     ///< only for m < 1 in the direct model
    double dissipation = kNaN;  ///< only for m < 1 in the direct model
    double sup_norm = 0.0;
    double K = 0.0;  ///< int x^2 c
    double l1_to_equilibrium = kNaN;
    std::size_t clamp_events = 0;
    double mu_left = kNaN;
    double mu_right = kNaN;
    double total_mass = kNaN;
};

/// Assembles a record for the direct model. Entropy-type entries are skipped (NaN) if c has no positive node.
inline DiagnosticsRecord make_record(double t, const Field& c) {
    DiagnosticsRecord r;
    r.t = t;
    r.mass = mass(c);
    r.J = first_moment(c);
    r.J_shift = r.J + r.mass;
    r.alpha = alpha_of(c);
    r.c_left = c.front();
    r.c_right = c.back();
    r.sup_norm = c.sup_norm();
    r.K = second_moment(c);
    r.total_mass = r.mass;
    if (!(r.mass > 0.0) || !c.all_finite()) return r;

    const Field eq = equilibrium_of(c);
    r.entropy = relative_entropy(c, eq);
    r.l1_to_equilibrium = l1_distance(c, eq);
    r.fisher = detail::fisher_information_log(c, detail::log_gamma_c(c), &r.clamp_events);
    if (strictly_subcritical(r.mass)) {
        const double gap = r.alpha * (1.0 - r.mass) - r.J;
        r.lyapunov = r.entropy + r.J * r.J / (2.0 * (1.0 - r.mass));
        r.dissipation = r.fisher + gap * gap / (1.0 - r.mass);
    }
    return r;
}

enum class DecayQuantity { entropy, lyapunov, l1 };

struct DecayFitOptions {
    double t_min = 0.5;
    double t_max = std::numeric_limits<double>::infinity();
    double floor = 1e-13;
    std::size_t min_samples = 10;
};

inline double decay_value(const DiagnosticsRecord& r, DecayQuantity q) {
    switch (q) {
        case DecayQuantity::entropy: return r.entropy;
        case DecayQuantity::lyapunov: return r.lyapunov;
        case DecayQuantity::l1: return r.l1_to_equilibrium;
    }
    return kNaN;
}

/// Least-squares slope of log(quantity) against t over the usable samples.
inline double decay_rate_fit(std::span<const DiagnosticsRecord> trajectory, DecayQuantity quantity,
                             const DecayFitOptions& opt = {}) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : trajectory) {
        const double q = decay_value(r, quantity);
        if (r.t < opt.t_min || r.t > opt.t_max || !std::isfinite(q) || q <= opt.floor) continue;
        pts.emplace_back(r.t, std::log(q));
    }
    if (pts.size() < opt.min_samples) {
        throw std::invalid_argument("decay_rate_fit: only " + std::to_string(pts.size()) + " usable samples (need " +
                                    std::to_string(opt.min_samples) + ")");
    }
    double mt = 0.0, my = 0.0;
    for (const auto& [t, y] : pts) {
        mt += t;
        my += y;
    }
    mt /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double stt = 0.0, sty = 0.0;
    for (const auto& [t, y] : pts) {
        stt += (t - mt) * (t - mt);
        sty += (t - mt) * (y - my);
    }
    return sty / stt;
}

}  // namespace polarity
