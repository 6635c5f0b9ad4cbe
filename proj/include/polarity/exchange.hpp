#pragma once

/**
 * @file exchange.hpp
 * @brief Direct model with attachment/detachment of markers at the boundary.
 *
 *     c_t = (c_x + (x + mu_- - mu_+) c)_x
 *     mu_-' = c(-1) - mu_-,    mu_+' = c(1) - mu_+
 *     boundary flux:  Q(-1) = mu_-',  Q(1) = -mu_+'
 *
 * The unknowns are ordered (mu_-, c_0, ..., c_N, mu_+), which keeps the
 * backward-Euler system tridiagonal. Summing all rows telescopes, so
 * sum_i w_i c_i + mu_- + mu_+ is conserved exactly.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include "polarity/dynamics.hpp"
#include "polarity/stationary.hpp"

namespace polarity {

struct ExchangeState {
    Field interior;
    double mu_left = 0.0;
    double mu_right = 0.0;

    double total_mass() const { return mass(interior) + mu_left + mu_right; }
    double drift_alpha() const { return mu_left - mu_right; }

    /// Reflection x -> -x, swapping the boundary masses.
    ExchangeState reflected() const { return {interior.reflected(), mu_right, mu_left}; }
};

/// Default boundary masses mu_+-(0) = c0(+-1) (kinetic quasi-equilibrium).
inline ExchangeState make_exchange_state(Field interior) {
    const double left = interior.front();
    const double right = interior.back();
    return {std::move(interior), left, right};
}

/// Exchange state built from a stationary profile of the exchange model.
inline ExchangeState exchange_state_from(const StationaryState& s) {
    if (s.model != Model::exchange) throw std::invalid_argument("exchange_state_from: not an exchange-model state");
    return make_exchange_state(s.field);
}

/// Rescales a profile shape so that mass(c) + c(-1) + c(1) = total, with mu at quasi-equilibrium.
inline ExchangeState exchange_state_with_total_mass(const Field& shape, double total) {
    const double current = mass(shape) + shape.front() + shape.back();
    if (!(current > 0.0)) throw std::invalid_argument("exchange_state_with_total_mass: shape has zero mass");
    return make_exchange_state(shape.scaled(total / current));
}

/// One backward-Euler step with alpha = mu_- - mu_+ frozen at the start of the step.
inline ExchangeState exchange_step(const ExchangeState& s, double dt, const ModelParams& params = {},
                                   FluxScheme scheme = FluxScheme::exponential_fitting) {
    if (!(dt > 0.0)) throw std::invalid_argument("exchange_step: dt must be > 0");
    const Grid& grid = s.interior.grid();
    const std::size_t n = grid.size();
    const double alpha = s.drift_alpha();
    const FaceFluxes q = face_fluxes(grid, [&](double x) { return drift_at(x, alpha, params); }, params.d_prime, scheme);

    TridiagonalSystem sys(n + 2);
    assemble_interior(sys, 1, s.interior, q, dt);

    // Boundary-bound masses: (1/dt + 1) mu - c_boundary = mu_old / dt.
    sys.diag[0] = 1.0 / dt + 1.0;
    sys.upper[0] = -1.0;
    sys.rhs[0] = s.mu_left / dt;
    sys.diag[n + 1] = 1.0 / dt + 1.0;
    sys.lower[n + 1] = -1.0;
    sys.rhs[n + 1] = s.mu_right / dt;

    // Boundary nodes lose (c - mu) to the attached pool.
    sys.diag[1] += 1.0;
    sys.lower[1] = -1.0;
    sys.diag[n] += 1.0;
    sys.upper[n] = -1.0;

    std::vector<double> u = solve_tridiagonal(sys);
    refine_solution(sys, u, [&](const std::vector<double>& v) {
        const std::span<const double> c(v.data() + 1, n);
        std::vector<long double> interior = balance_residual(s.interior, q, dt, c);
        const long double left = static_cast<long double>(c.front()) - v.front();
        const long double right = static_cast<long double>(c.back()) - v.back();
        interior.front() -= left;
        interior.back() -= right;
        std::vector<double> r(n + 2);
        r.front() = static_cast<double>((static_cast<long double>(s.mu_left) - v.front()) / dt + left);
        r.back() = static_cast<double>((static_cast<long double>(s.mu_right) - v.back()) / dt + right);
        std::copy(interior.begin(), interior.end(), r.begin() + 1);
        return r;
    });
    const double mu_left = u.front();
    const double mu_right = u.back();
    std::vector<double> interior(u.begin() + 1, u.end() - 1);
    return {Field(s.interior.grid_ptr(), std::move(interior)), mu_left, mu_right};
}

inline DiagnosticsRecord make_exchange_record(double t, const ExchangeState& s) {
    DiagnosticsRecord r = make_record(t, s.interior);
    r.alpha = s.drift_alpha();
    r.mu_left = s.mu_left;
    r.mu_right = s.mu_right;
    r.total_mass = s.total_mass();
    r.lyapunov = kNaN;
    r.dissipation = kNaN;
    return r;
}

/**
 * Runs the exchange model to t_end. |mu_- - mu_+| is bounded by the total
 * mass, so a firing blow-up detector means the discretization broke down
 * and is reported as integrity_failure.
 */
inline SimOutcome exchange_simulate(const ExchangeState& s0, const StepperConfig& cfg, const ModelParams& params = {},
                                    FluxScheme scheme = FluxScheme::exponential_fitting) {
    cfg.validate();
    params.validate();
    detail::require_initial(s0.interior, "exchange_simulate");
    if (!(s0.mu_left >= 0.0) || !(s0.mu_right >= 0.0)) {
        throw std::invalid_argument("exchange_simulate: boundary masses must be non-negative");
    }
    const double total = s0.total_mass();
    const BlowupThresholds th = resolve_thresholds(cfg, s0.interior.grid(), total);
    const std::size_t n_steps = cfg.n_steps();
    const auto snap_steps = detail::snapshot_steps(cfg);
    auto next_snap = snap_steps.begin();

    SimOutcome out;
    ExchangeState s = s0;
    const auto finish = [&](SimStatus status, double t, std::string message) {
        out.status = status;
        out.message = std::move(message);
        out.final_time = t;
        out.mu_left = s.mu_left;
        out.mu_right = s.mu_right;
        out.final_state = s.interior;
        return out;
    };
    const auto take_snapshot = [&](std::size_t k) {
        while (next_snap != snap_steps.end() && *next_snap == k) {
            out.snapshots.push_back({static_cast<double>(k) * cfg.dt, s.interior});
            ++next_snap;
        }
    };

    out.trajectory.push_back(make_exchange_record(0.0, s));
    take_snapshot(0);
    for (std::size_t k = 1; k <= n_steps; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        try {
            s = exchange_step(s, cfg.dt, params, scheme);
        } catch (const SolverError& e) {
            return finish(SimStatus::integrity_failure, t - cfg.dt, e.what());
        }
        if (const auto check = detect_blowup(s.interior, th); check.fired) {
            return finish(SimStatus::integrity_failure, t, "blow-up detector fired (" + check.reason + ")");
        }
        if (detail::positivity_violated(s.interior) || s.mu_left < 0.0 || s.mu_right < 0.0) {
            return finish(SimStatus::integrity_failure, t, "positivity violated at t = " + std::to_string(t));
        }
        if (k % cfg.record_every == 0 || k == n_steps) out.trajectory.push_back(make_exchange_record(t, s));
        take_snapshot(k);
    }
    return finish(SimStatus::completed, static_cast<double>(n_steps) * cfg.dt, {});
}

}  // namespace polarity
