#pragma once

/**
 * @file dynamics.hpp
 * @brief Time integration of the direct model
 *
 *     c_t = (D' c_x + v c)_x,   v(x) = k_d x + p (c(-1) - c(1)),
 *     D' c_x + v c = 0 at x = -1 and x = 1,
 *
 * where p = delta*gamma + delta/2 (p = k_d = D' = 1 for the canonical model).
 *
 * One step freezes alpha = c(-1) - c(1) at the current state and advances the
 * resulting linear drift-diffusion problem by backward Euler. The flux through
 * the face between nodes i and i+1 is the exponentially fitted
 * (Scharfetter-Gummel) flux
 *
 *     Q = D'/dx [ B(-s) c_{i+1} - B(s) c_i ],   s = v(x_{i+1/2}) dx / D',
 *     B(z) = z / (e^z - 1),
 *
 * and the node balance uses the trapezoid weights, with Q = 0 on the two
 * boundary faces. Summing the rows telescopes the fluxes, so sum_i w_i c_i
 * is conserved exactly; the matrix is an M-matrix for every dt, so positivity
 * is preserved. For a drift that is affine in x, exp(-int v / D') sampled at
 * the nodes is an exact discrete equilibrium.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "polarity/diagnostics.hpp"
#include "polarity/grid.hpp"
#include "polarity/tridiagonal.hpp"

namespace polarity {

/// Physical / scheme coefficients of the generalized one-dimensional drift.
struct ModelParams {
    double k_d = 1.0;              ///< depolymerization rate
    double delta = 1.0;            ///< coupling strength
    double gamma = 0.5;            ///< friction coefficient
    double d_prime = 1.0;          ///< diffusivity D'
    double drift_prefactor = 1.0;  ///< delta*gamma + delta/(b-a), b-a = 2

    static ModelParams canonical() { return {}; }

    static ModelParams from_physical(double k_d, double delta, double gamma, double d_prime) {
        ModelParams p{k_d, delta, gamma, d_prime, delta * gamma + delta / 2.0};
        p.validate();
        return p;
    }

    void validate() const {
        if (!(d_prime > 0.0)) throw std::invalid_argument("ModelParams: d_prime must be > 0");
        if (!(k_d >= 0.0)) throw std::invalid_argument("ModelParams: k_d must be >= 0");
        if (!(drift_prefactor >= 0.0)) throw std::invalid_argument("ModelParams: drift_prefactor must be >= 0");
    }
};

/// v(x) = k_d x + prefactor * alpha.
inline double drift_at(double x, double alpha, const ModelParams& params) {
    return params.k_d * x + params.drift_prefactor * alpha;
}

enum class FluxScheme {
    exponential_fitting,  ///< Scharfetter-Gummel; positivity for every dt
    central               ///< plain central differencing, debug only
};

struct StepOptions {
    FluxScheme scheme = FluxScheme::exponential_fitting;
    /// Re-solve once with alpha taken from the provisional new state.
    bool refresh_alpha = false;
    /// Replaces drift_at(x, alpha, params) when set (e.g. v = -1 + alpha).
    std::function<double(double x, double alpha)> drift_override;
};

/// Bernoulli function z / (e^z - 1).
inline double bernoulli(double z) {
    if (std::abs(z) < 1e-10) return 1.0 - 0.5 * z;
    return z / std::expm1(z);
}

/// Face coefficients of Q_{i+1/2} = upwind[i] * c_{i+1} - downwind[i] * c_i, i = 0..n_cells-1.
struct FaceFluxes {
    std::vector<double> upwind;
    std::vector<double> downwind;
};

template <typename Drift>
FaceFluxes face_fluxes(const Grid& grid, Drift&& drift, double d_prime, FluxScheme scheme) {
    const std::size_t faces = grid.n_cells();
    const double dx = grid.dx();
    FaceFluxes out{std::vector<double>(faces), std::vector<double>(faces)};
    for (std::size_t i = 0; i < faces; ++i) {
        const double x_mid = 0.5 * (grid.x(i) + grid.x(i + 1));
        const double v = drift(x_mid);
        if (scheme == FluxScheme::exponential_fitting) {
            const double s = v * dx / d_prime;
            out.upwind[i] = d_prime / dx * bernoulli(-s);
            out.downwind[i] = d_prime / dx * bernoulli(s);
        } else {
            out.upwind[i] = d_prime / dx + 0.5 * v;
            out.downwind[i] = d_prime / dx - 0.5 * v;
        }
    }
    return out;
}

/**
 * Writes the backward-Euler rows of the nodal balance into `sys` starting at
 * row `offset`: (w_i/dt) c_i - (Q_{i+1/2} - Q_{i-1/2}) = (w_i/dt) c_i^n, with
 * Q = 0 on the outer faces. Callers add boundary exchange terms afterwards.
 */
inline void assemble_interior(TridiagonalSystem& sys, std::size_t offset, const Field& c_old, const FaceFluxes& q,
                              double dt) {
    const Grid& grid = c_old.grid();
    const std::size_t n = grid.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t row = offset + i;
        const double w = grid.weight(i);
        double diag = w / dt;
        if (i + 1 < n) {
            diag += q.downwind[i];
            sys.upper[row] = -q.upwind[i];
        }
        if (i > 0) {
            diag += q.upwind[i - 1];
            sys.lower[row] = -q.downwind[i - 1];
        }
        sys.diag[row] = diag;
        sys.rhs[row] = w / dt * c_old[i];
    }
}

/**
 * rhs - A u for the rows written by assemble_interior, in long double and in
 * flux form, so the weighted row sum telescopes to (sum w_i (c_i^n - u_i))/dt
 * without the rounding carried by the summed diagonal.
 */
inline std::vector<long double> balance_residual(const Field& c_old, const FaceFluxes& q, double dt,
                                                 std::span<const double> u) {
    const Grid& grid = c_old.grid();
    const std::size_t n = grid.size();
    std::vector<long double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = static_cast<long double>(grid.weight(i)) / dt * (static_cast<long double>(c_old[i]) - u[i]);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const long double flux = static_cast<long double>(q.upwind[i]) * u[i + 1] -
                                 static_cast<long double>(q.downwind[i]) * u[i];
        r[i] += flux;
        r[i + 1] -= flux;
    }
    return r;
}

namespace detail {

inline std::vector<double> rounded(const std::vector<long double>& v) { return {v.begin(), v.end()}; }

inline Field solve_direct(const Field& f, const ModelParams& params, double dt, double alpha,
                          const StepOptions& options) {
    const Grid& grid = f.grid();
    const auto drift = [&](double x) {
        return options.drift_override ? options.drift_override(x, alpha) : drift_at(x, alpha, params);
    };
    const FaceFluxes q = face_fluxes(grid, drift, params.d_prime, options.scheme);
    TridiagonalSystem sys(grid.size());
    assemble_interior(sys, 0, f, q, dt);
    std::vector<double> u = solve_tridiagonal(sys);
    refine_solution(sys, u, [&](const std::vector<double>& v) { return rounded(balance_residual(f, q, dt, v)); });
    return Field(f.grid_ptr(), std::move(u));
}

}  // namespace detail

/// One semi-implicit step with lagged alpha. Throws SolverError if the linear solve fails.
inline Field step(const Field& f, const ModelParams& params, double dt, const StepOptions& options = {}) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
    Field next = detail::solve_direct(f, params, dt, alpha_of(f), options);
    if (options.refresh_alpha && next.all_finite()) {
        next = detail::solve_direct(f, params, dt, alpha_of(next), options);
    }
    return next;
}

struct StepperConfig {
    double dt = 1e-2;
    double t_end = 4.0;
    std::optional<double> blowup_alpha_threshold;    ///< default 1/dx
    std::optional<double> blowup_supnorm_threshold;  ///< default 10 M/dx
    std::size_t record_every = 1;
    std::vector<double> snapshot_times;

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("StepperConfig: dt must be > 0");
        if (!(t_end >= 0.0)) throw std::invalid_argument("StepperConfig: t_end must be >= 0");
        if (record_every == 0) throw std::invalid_argument("StepperConfig: record_every must be >= 1");
        if (blowup_alpha_threshold && !(*blowup_alpha_threshold > 0.0)) {
            throw std::invalid_argument("StepperConfig: blowup_alpha_threshold must be > 0");
        }
        if (blowup_supnorm_threshold && !(*blowup_supnorm_threshold > 0.0)) {
            throw std::invalid_argument("StepperConfig: blowup_supnorm_threshold must be > 0");
        }
    }

    std::size_t n_steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }
};

struct BlowupThresholds {
    double alpha;
    double sup_norm;
};

inline BlowupThresholds resolve_thresholds(const StepperConfig& cfg, const Grid& grid, double M) {
    return {cfg.blowup_alpha_threshold.value_or(1.0 / grid.dx()),
            cfg.blowup_supnorm_threshold.value_or(10.0 * M / grid.dx())};
}

struct BlowupCheck {
    bool fired = false;
    std::string reason;  ///< "nonfinite", "alpha" or "supnorm"
};

inline BlowupCheck detect_blowup(const Field& f, const BlowupThresholds& th) {
    if (!f.all_finite()) return {true, "nonfinite"};
    if (std::abs(alpha_of(f)) > th.alpha) return {true, "alpha"};
    if (f.sup_norm() > th.sup_norm) return {true, "supnorm"};
    return {};
}

/// Resolves default thresholds with the field's own mass.
inline BlowupCheck detect_blowup(const Field& f, const StepperConfig& cfg) {
    if (!f.all_finite()) return {true, "nonfinite"};
    return detect_blowup(f, resolve_thresholds(cfg, f.grid(), mass(f)));
}

enum class SimStatus { completed, blew_up, integrity_failure };

inline std::string_view to_string(SimStatus s) {
    switch (s) {
        case SimStatus::completed: return "completed";
        case SimStatus::blew_up: return "blew_up";
        case SimStatus::integrity_failure: return "integrity_failure";
    }
    return "unknown";
}

struct Snapshot {
    double t;
    Field field;
};

struct SimOutcome {
    SimStatus status = SimStatus::completed;
    Field final_state;
    double final_time = 0.0;
    std::optional<double> blowup_time;
    std::vector<DiagnosticsRecord> trajectory;
    std::vector<Snapshot> snapshots;
    std::string message;  ///< blow-up trigger or failure description
    double mu_left = kNaN;   ///< exchange model only
    double mu_right = kNaN;  ///< exchange model only
};

namespace detail {

/// Steps whose time is closest to each requested snapshot time.
inline std::vector<std::size_t> snapshot_steps(const StepperConfig& cfg) {
    std::vector<std::size_t> steps;
    const std::size_t n = cfg.n_steps();
    for (double t : cfg.snapshot_times) {
        if (t < 0.0) continue;
        steps.push_back(std::min(n, static_cast<std::size_t>(std::llround(t / cfg.dt))));
    }
    std::sort(steps.begin(), steps.end());
    steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
    return steps;
}

inline void require_initial(const Field& f0, const char* what) {
    if (!f0.is_valid()) throw std::invalid_argument(std::string(what) + ": initial field must be finite and non-negative");
    if (!(mass(f0) > 0.0)) throw std::invalid_argument(std::string(what) + ": initial field must have positive mass");
}

inline bool positivity_violated(const Field& f) {
    const auto v = f.values();
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *lo < -1e-12 * std::max(*hi, 0.0);
}

}  // namespace detail

/// Iterates step() until t_end or until detect_blowup fires.
inline SimOutcome simulate(const Field& f0, const ModelParams& params, const StepperConfig& cfg,
                           const StepOptions& options = {}) {
    cfg.validate();
    params.validate();
    detail::require_initial(f0, "simulate");

    const BlowupThresholds th = resolve_thresholds(cfg, f0.grid(), mass(f0));
    const std::size_t n_steps = cfg.n_steps();
    const auto snap_steps = detail::snapshot_steps(cfg);
    auto next_snap = snap_steps.begin();

    SimOutcome out;
    Field c = f0;
    const auto take_snapshot = [&](std::size_t k, const Field& f) {
        while (next_snap != snap_steps.end() && *next_snap == k) {
            out.snapshots.push_back({static_cast<double>(k) * cfg.dt, f});
            ++next_snap;
        }
    };

    out.trajectory.push_back(make_record(0.0, c));
    take_snapshot(0, c);
    for (std::size_t k = 1; k <= n_steps; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        Field next;
        try {
            next = step(c, params, cfg.dt, options);
        } catch (const SolverError& e) {
            out.status = SimStatus::integrity_failure;
            out.message = e.what();
            out.final_state = std::move(c);
            out.final_time = t - cfg.dt;
            return out;
        }
        c = std::move(next);

        if (const auto check = detect_blowup(c, th); check.fired) {
            out.status = SimStatus::blew_up;
            out.blowup_time = t;
            out.message = check.reason;
            out.trajectory.push_back(make_record(t, c));
            out.final_state = std::move(c);
            out.final_time = t;
            return out;
        }
        if (detail::positivity_violated(c)) {
            out.status = SimStatus::integrity_failure;
            out.message = "positivity violated at t = " + std::to_string(t);
            out.final_state = std::move(c);
            out.final_time = t;
            return out;
        }
        if (k % cfg.record_every == 0 || k == n_steps) out.trajectory.push_back(make_record(t, c));
        take_snapshot(k, c);
    }
    out.final_state = std::move(c);
    out.final_time = static_cast<double>(n_steps) * cfg.dt;
    return out;
}

/// Hypotheses of the finite-time blow-up criterion, evaluated on initial data.
struct BlowupHypotheses {
    double mass = 0.0;
    double shifted_moment = 0.0;
    double trace_gap_value = 0.0;
    bool mass_supercritical = false;    ///< M > 1
    bool shifted_moment_small = false;  ///< J~(0) < (M-1)/2
    bool trace_gap = false;             ///< c0(-1) - c0(1) > 1
    bool monotone_decreasing = false;   ///< c0 non-increasing node to node

    /// Blow-up criterion for the direct model (monotonicity not needed).
    bool theorem_eligible() const { return mass_supercritical && shifted_moment_small && trace_gap; }
    /// Blow-up criterion for the modified equation with constant drift -1 + alpha.
    bool modified_eligible() const { return theorem_eligible() && monotone_decreasing; }
};

inline BlowupHypotheses check_blowup_hypotheses(const Field& f0) {
    BlowupHypotheses h;
    h.mass = mass(f0);
    h.shifted_moment = shifted_moment(f0);
    h.trace_gap_value = alpha_of(f0);
    h.mass_supercritical = h.mass > 1.0;
    h.shifted_moment_small = h.shifted_moment < 0.5 * (h.mass - 1.0);
    h.trace_gap = h.trace_gap_value > 1.0;
    const auto v = f0.values();
    h.monotone_decreasing = std::adjacent_find(v.begin(), v.end(), [](double a, double b) { return b > a; }) == v.end();
    return h;
}

}  // namespace polarity
