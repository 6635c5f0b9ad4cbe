// Runs the ten acceptance criteria and prints one PASS/FAIL line per criterion.
// Exit status is 0 only when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "polarity/diagnostics.hpp"
#include "polarity/dynamics.hpp"
#include "polarity/exchange.hpp"
#include "polarity/stationary.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace polarity;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

// Relative conservation errors of every run in the suite, consumed by criterion 1.
struct ConservationLog {
    double worst_direct = 0.0;
    double worst_exchange = 0.0;
    int runs = 0;

    void direct(const SimOutcome& out, double m0) {
        worst_direct = std::max(worst_direct, std::abs(mass(out.final_state) - m0) / m0);
        ++runs;
    }
    void exchange(const SimOutcome& out, double total0) {
        const double total = mass(out.final_state) + out.mu_left + out.mu_right;
        worst_exchange = std::max(worst_exchange, std::abs(total - total0) / total0);
        ++runs;
    }
};

ConservationLog conservation;

StepperConfig stepper(double dt, double t_end) {
    StepperConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    return cfg;
}

SimOutcome run_direct(const Field& f0, const StepperConfig& cfg) {
    SimOutcome out = simulate(f0, ModelParams::canonical(), cfg);
    conservation.direct(out, mass(f0));
    return out;
}

SimOutcome run_exchange(const ExchangeState& s0, const StepperConfig& cfg) {
    SimOutcome out = exchange_simulate(s0, cfg);
    conservation.exchange(out, s0.total_mass());
    return out;
}

// Shared by criteria 3 and 10.
SimOutcome subcritical_run;

Verdict stationary_fixed_points() {
    struct Case {
        Model model;
        double M;
    };
    const std::vector<Case> cases = {{Model::direct, 0.5}, {Model::direct, 1.0}, {Model::direct, 1.2},
                                     {Model::exchange, 1.0}, {Model::exchange, 3.0}};
    const double dt = 1e-2;
    const auto movements = [&](std::size_t n) {
        const auto g = build_grid(n);
        std::vector<double> moves;
        for (const auto& c : cases) {
            for (const auto& s : enumerate_states(c.M, c.model, g)) {
                if (c.model == Model::direct) {
                    Field f = s.field;
                    for (int k = 0; k < 100; ++k) f = step(f, ModelParams::canonical(), dt);
                    moves.push_back(l1_distance(f, s.field));
                } else {
                    ExchangeState e = exchange_state_from(s);
                    for (int k = 0; k < 100; ++k) e = exchange_step(e, dt);
                    moves.push_back(l1_distance(e.interior, s.field));
                }
            }
        }
        return moves;
    };
    const auto coarse = movements(1000);
    const auto fine = movements(2000);
    const double dx_c = 2.0 / 1000, dx_f = 2.0 / 2000;
    const double floor = 1e-8;

    bool pass = true;
    double worst_coarse = 0.0, worst_fine = 0.0, min_ratio = INFINITY;
    bool at_floor = true;
    for (std::size_t k = 0; k < coarse.size(); ++k) {
        worst_coarse = std::max(worst_coarse, coarse[k]);
        worst_fine = std::max(worst_fine, fine[k]);
        pass &= coarse[k] <= 5 * dx_c * dx_c && fine[k] <= 5 * dx_f * dx_f;
        const double ratio = coarse[k] / fine[k];
        min_ratio = std::min(min_ratio, ratio);
        // A ratio is only meaningful while the movement sits above rounding noise.
        const bool roundoff = std::max(coarse[k], fine[k]) <= floor;
        at_floor &= roundoff;
        pass &= ratio >= 3.0 || roundoff;
    }
    std::string detail = std::to_string(coarse.size()) + " states, max move n=1000 " + fmt("%.3e", worst_coarse) +
                         " (bound " + fmt("%.1e", 5 * dx_c * dx_c) + "), n=2000 " + fmt("%.3e", worst_fine) +
                         " (bound " + fmt("%.1e", 5 * dx_f * dx_f) + "), min ratio " + fmt("%.3g", min_ratio);
    if (at_floor) detail += "; movement at roundoff floor; refinement ratio not measurable";
    return {pass, detail};
}

Verdict subcritical_decay() {
    const auto g = build_grid(1000);
    subcritical_run = run_direct(fixtures::shifted_gaussian(g, 0.8), stepper(1e-2, 4.0));
    if (subcritical_run.status != SimStatus::completed) return {false, "run did not complete"};
    DecayFitOptions opt;
    opt.t_min = 0.5;
    opt.t_max = 4.0;
    const double sl = decay_rate_fit(subcritical_run.trajectory, DecayQuantity::lyapunov, opt);
    const double s1 = decay_rate_fit(subcritical_run.trajectory, DecayQuantity::l1, opt);
    return {sl <= -2.0 + 0.15 && s1 <= -1.0 + 0.15,
            "lyapunov slope " + fmt("%.4f", sl) + " (<= -1.85), l1 slope " + fmt("%.4f", s1) + " (<= -0.85)"};
}

Verdict critical_decay() {
    const auto g = build_grid(1000);
    const auto out = run_direct(fixtures::shifted_gaussian(g, 1.0), stepper(1e-2, 6.0));
    if (out.status != SimStatus::completed) return {false, "run did not complete"};
    DecayFitOptions opt;
    opt.t_min = 0.5;
    opt.t_max = 6.0;
    const double s = decay_rate_fit(out.trajectory, DecayQuantity::entropy, opt);
    return {s <= -1.0 + 0.15, "entropy slope " + fmt("%.4f", s) + " (<= -0.85)"};
}

Verdict blowup_dichotomy() {
    const auto g = build_grid(1000);
    const Field f0 = fixtures::steep_profile(g, 2.0);
    const auto hyp = check_blowup_hypotheses(f0);
    if (!hyp.theorem_eligible()) return {false, "initial profile fails the blow-up hypotheses"};

    const auto direct = run_direct(f0, stepper(1e-4, 4.0));
    bool rising = direct.trajectory.size() >= 21;
    for (std::size_t k = direct.trajectory.size() - 20; rising && k < direct.trajectory.size(); ++k) {
        rising = direct.trajectory[k].alpha > direct.trajectory[k - 1].alpha;
    }
    const bool blew = direct.status == SimStatus::blew_up;

    const ExchangeState s0 = exchange_state_with_total_mass(f0, 2.0);
    const auto ex = run_exchange(s0, stepper(1e-2, 20.0));
    const double bound = 10.0 * 2.0 / g->dx();
    double sup = 0.0, gap = 0.0;
    for (const auto& r : ex.trajectory) {
        sup = std::max(sup, r.sup_norm);
        gap = std::max(gap, std::abs(r.mu_left - r.mu_right));
    }
    const bool bounded = ex.status == SimStatus::completed && sup < bound && gap <= 2.0 + 1e-10;

    std::string detail = std::string("direct ") + std::string(to_string(direct.status));
    if (direct.blowup_time) detail += " at t=" + fmt("%.4g", *direct.blowup_time) + " (" + direct.message + ")";
    detail += ", alpha rising over last 20: " + std::string(rising ? "yes" : "no");
    detail += "; exchange " + std::string(to_string(ex.status)) + " to t=" + fmt("%.3g", ex.final_time) +
              ", max sup " + fmt("%.4g", sup) + " (< " + fmt("%.4g", bound) + "), max |mu- - mu+| " +
              fmt("%.4g", gap) + " (<= 2)";
    return {blew && rising && bounded, detail};
}

Verdict critical_masses() {
    const double od = oracle::critical_mass_direct();
    const double oe = oracle::critical_mass_exchange();
    const double cd = critical_mass(Model::direct);
    const double ce = critical_mass(Model::exchange);
    const bool pass = std::abs(cd - 1.41073) <= 1e-4 && std::abs(ce - 2.41073) <= 1e-4 && std::abs(cd - od) <= 1e-4 &&
                      std::abs(ce - oe) <= 1e-4;
    return {pass, "direct " + fmt("%.10f", cd) + " (oracle " + fmt("%.10f", od) + "), exchange " + fmt("%.10f", ce) +
                      " (oracle " + fmt("%.10f", oe) + ")"};
}

Verdict state_counts() {
    const auto g = build_grid(1000);
    const std::size_t d1 = enumerate_states(0.8, Model::direct, g).size();
    const std::size_t d2 = enumerate_states(1.2, Model::direct, g).size();
    const std::size_t d3 = enumerate_states(2.0, Model::direct, g).size();
    const std::size_t e1 = enumerate_states(2.0, Model::exchange, g).size();
    const std::size_t e2 = enumerate_states(3.0, Model::exchange, g).size();
    const bool pass = d1 == 1 && d2 == 3 && d3 == 1 && e1 == 1 && e2 == 3;
    return {pass, "direct (" + std::to_string(d1) + ", " + std::to_string(d2) + ", " + std::to_string(d3) +
                      "), exchange (" + std::to_string(e1) + ", " + std::to_string(e2) + ")"};
}

Verdict moment_residual() {
    // Data compatible with the no-flux condition, so the residual measures the scheme rather than an initial layer.
    const auto residual = [](std::size_t n, double dt) {
        const auto g = build_grid(n);
        const auto out = run_direct(fixtures::compatible_start(g, 0.8, 0.5), stepper(dt, 4.0));
        return fixtures::max_moment_residual(out.trajectory, dt, 0.8);
    };
    const double coarse = residual(1000, 1e-2);
    const double fine = residual(1414, 5e-3);
    const double ratio = coarse / fine;
    return {ratio >= 2.0, "residual (n=1000, dt=1e-2) " + fmt("%.4e", coarse) + ", (n=1414, dt=5e-3) " +
                              fmt("%.4e", fine) + ", ratio " + fmt("%.4f", ratio) + " (>= 2)"};
}

Verdict inequalities() {
    const auto g = build_grid(400);
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> mass_dist(0.2, 3.0), tilt(-2.0, 2.0);
    int ck_bad = 0, lsi_bad = 0;
    double ck_worst = -INFINITY, lsi_worst = -INFINITY;
    for (int k = 0; k < 1000; ++k) {
        const double M = mass_dist(rng);
        const Field f = fixtures::random_smooth_field(g, rng, M);
        const Field h = fixtures::random_smooth_field(g, rng, M);
        const auto ck = ck_gap(f, h);
        ck_worst = std::max(ck_worst, ck.lhs - ck.rhs);
        ck_bad += ck.lhs > ck.rhs + 1e-8;

        const Field u = fixtures::random_smooth_field(g, rng, M);
        const Field nu = fixtures::gamma_shaped(g, tilt(rng), M);
        const auto lsi = lsi_gap(u, nu);
        lsi_worst = std::max(lsi_worst, lsi.lhs - lsi.rhs);
        lsi_bad += lsi.lhs > lsi.rhs + 1e-8;
    }
    return {ck_bad == 0 && lsi_bad == 0, "CK violations " + std::to_string(ck_bad) + "/1000 (max lhs-rhs " +
                                             fmt("%.3e", ck_worst) + "), LSI violations " + std::to_string(lsi_bad) +
                                             "/1000 (max lhs-rhs " + fmt("%.3e", lsi_worst) + ")"};
}

Verdict decomposition() {
    if (subcritical_run.trajectory.empty()) return {false, "criterion 3 run unavailable"};
    // The decomposition is evaluated on the recorded states; rebuild them by replaying the run.
    const auto g = build_grid(1000);
    Field c = fixtures::shifted_gaussian(g, 0.8);
    double worst = std::abs(entropy_decomposition(c).residual());
    std::size_t samples = 1;
    const double dt = 1e-2;
    for (std::size_t k = 1; k < subcritical_run.trajectory.size(); ++k) {
        c = step(c, ModelParams::canonical(), dt);
        worst = std::max(worst, std::abs(entropy_decomposition(c).residual()));
        ++samples;
    }
    const bool same_end = l1_distance(c, subcritical_run.final_state) == 0.0;
    return {worst <= 1e-8 && same_end,
            "max |residual| " + fmt("%.3e", worst) + " over " + std::to_string(samples) + " samples (<= 1e-8)"};
}

Verdict conservation_all() {
    const bool pass = conservation.worst_direct <= 1e-10 && conservation.worst_exchange <= 1e-10;
    return {pass, std::to_string(conservation.runs) + " runs, max relative drift direct " +
                      fmt("%.3e", conservation.worst_direct) + ", exchange " + fmt("%.3e", conservation.worst_exchange) +
                      " (<= 1e-10)"};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Verdict()> run;
    };
    // Conservation is evaluated last because it inspects every run made by the others.
    const std::vector<Criterion> order = {
        {2, "stationary fixed points", stationary_fixed_points},
        {3, "sub-critical decay", subcritical_decay},
        {4, "critical decay", critical_decay},
        {5, "blow-up dichotomy", blowup_dichotomy},
        {6, "critical-mass constants", critical_masses},
        {7, "state counts", state_counts},
        {8, "moment residual refinement", moment_residual},
        {9, "inequality certificates", inequalities},
        {10, "entropy decomposition", decomposition},
        {1, "conservation", conservation_all},
    };

    std::vector<std::string> lines(11);
    int failures = 0;
    for (const auto& c : order) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failures += !v.pass;
        char head[96];
        std::snprintf(head, sizeof head, "[%s] %2d %-28s (%6.2f s) ", v.pass ? "PASS" : "FAIL", c.id, c.name, secs);
        lines[c.id] = head + v.detail;
    }
    for (int id = 1; id <= 10; ++id) std::printf("%s\n", lines[id].c_str());
    std::printf("%d/10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
