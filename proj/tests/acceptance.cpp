// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. `--criterion N` runs a single criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "regopt/equivalence.hpp"
#include "regopt/hedging.hpp"
#include "regopt/oracle.hpp"
#include "regopt/solver.hpp"
#include "support/test_support.hpp"

using namespace regopt;
using namespace regopt::testing;

namespace {

const MarketParams kMkt = baseline_market();
const CrraUtility kU = baseline_utility();

struct Criterion {
    int id;
    const char* title;
    bool (*fn)(std::string&);
};

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// 1. Equivalence table values at the published two-decimal levels.
bool criterion1(std::string& detail) {
    const double t0 = now_s();
    const double expected_pct[3] = {0.87, 1.70, 6.82};
    const auto rows = equivalence_table(kMkt, 100.0, 90.0, {0.005, 0.01, 0.05});
    bool ok = true;
    char buf[256];
    for (int i = 0; i < 3; ++i) {
        const double pct = 100.0 * rows[i].epsilon_pct;
        const bool row_ok = std::fabs(pct - expected_pct[i]) <= 0.005;
        ok = ok && row_ok;
        std::snprintf(buf, sizeof(buf), "%s alpha=%g: %.4f%% vs %.2f%%;",
                      row_ok ? "ok" : "MISMATCH", rows[i].alpha, pct, expected_pct[i]);
        detail += buf;
    }
    std::snprintf(buf, sizeof(buf), " %.2fs", now_s() - t0);
    detail += buf;
    return ok && (now_s() - t0) < 1.0;
}

// 2. Matched VaR/ES constraints give identical solutions on randomized
// configurations with the threshold below the tangent level.
bool criterion2(std::string& detail) {
    const double t0 = now_s();
    std::mt19937_64 rng(20250811);
    int accepted = 0, guard = 0;
    double worst_gap = 0.0, worst_lambda = 0.0;
    while (accepted < 20 && ++guard < 400) {
        const double gamma = 0.25 + 0.5 * uniform01(rng);
        const CrraUtility u(gamma);
        const double DT = 60.0 + 80.0 * uniform01(rng);
        const double L = (0.4 + 0.55 * uniform01(rng)) * std::min(DT / gamma, 1.6 * DT);
        const double alpha = 0.002 + 0.25 * uniform01(rng);
        const VarConstraint vc{L, alpha};
        const double x0_min = feasibility_min(kMkt, vc);
        const Solution probe = solve_var(kMkt, Institution(x0_min * 1.05 + 1.0, DT), u, vc);
        const double x0 =
            x0_min + (0.15 + 0.7 * uniform01(rng)) * (probe.diagnostics.x0_slack - x0_min);
        const Institution inst(x0, DT);
        const Solution var = solve_var(kMkt, inst, u, vc);
        if (var.regime.find("slack") != std::string::npos) continue;
        const Solution es =
            solve_es(kMkt, inst, u, EsConstraint{L, epsilon_for_alpha(kMkt, L, alpha)});
        worst_gap = std::max(worst_gap,
                             sup_gap_off_boundaries(var.profile, es.profile, 0.1, 20.0, 400) / x0);
        worst_lambda = std::max(worst_lambda,
                                std::fabs(var.lambda_budget - es.lambda_budget) /
                                    var.lambda_budget);
        ++accepted;
    }
    const double dt = now_s() - t0;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "configs=%d sup_gap=%.3g (tol 1e-6), lambda_gap=%.3g (tol 1e-8), %.2fs",
                  accepted, worst_gap, worst_lambda, dt);
    detail = buf;
    return accepted == 20 && worst_gap <= 1e-6 && worst_lambda <= 1e-8 && dt < 10.0;
}

// 3. 500-atom oracle crosscheck on every solution regime.
bool criterion3(std::string& detail) {
    const double t0 = now_s();
    bool ok = true;
    for (const NamedConfig& cfg : regime_battery()) {
        const Solution sol = solve(kMkt, cfg.inst, kU, cfg.constraint);
        const auto oi = make_instance(kMkt, cfg.inst, kU, cfg.constraint, 500);
        const auto rep = crosscheck(sol, oi, 1e-3, 1e-2);
        if (!rep.pass) {
            detail += std::string(" FAIL[") + cfg.name + ": " + rep.detail + "]";
            ok = false;
        }
    }
    const double dt = now_s() - t0;
    char buf[128];
    std::snprintf(buf, sizeof(buf), " %zu regimes, %.1fs (budget 60s)",
                  regime_battery().size(), dt);
    detail += buf;
    return ok && dt < 60.0;
}

// 4. Binding diagnostics: budget, default probability, expected shortfall.
bool criterion4(std::string& detail) {
    bool ok = true;
    for (const NamedConfig& cfg : regime_battery()) {
        const Solution sol = solve(kMkt, cfg.inst, kU, cfg.constraint);
        const bool binding = sol.regime.find("slack") == std::string::npos;
        const double budget_err =
            std::fabs(sol.diagnostics.budget - cfg.inst.x0) / cfg.inst.x0;
        bool this_ok = budget_err <= 1e-8;
        if (const auto* v = std::get_if<VarConstraint>(&cfg.constraint)) {
            if (binding && v->alpha > 0.0)
                this_ok = this_ok &&
                          std::fabs(sol.diagnostics.prob_below_threshold - v->alpha) <= 1e-8;
        }
        if (const auto* e = std::get_if<EsConstraint>(&cfg.constraint)) {
            if (binding && e->epsilon > 0.0)
                this_ok = this_ok &&
                          std::fabs(sol.diagnostics.expected_shortfall - e->epsilon) <=
                              1e-6 * e->epsilon;
        }
        if (!this_ok) {
            detail += std::string(" FAIL[") + cfg.name + "]";
            ok = false;
        }
    }
    if (ok) detail = "all binding solutions within tolerance";
    return ok;
}

// 5. Pointwise Lagrangian optimality (the executable proof structure).
bool criterion5(std::string& detail) {
    bool ok = true;
    double worst = 0.0;
    for (const NamedConfig& cfg : regime_battery()) {
        const Solution sol = solve(kMkt, cfg.inst, kU, cfg.constraint);
        if (!sol.lambda_risk.has_value() &&
            !std::holds_alternative<NoConstraint>(cfg.constraint))
            continue; // alpha = 0: hard constraint with no finite multiplier
        const auto check =
            pointwise_lagrangian_check(sol, kMkt, kU, cfg.inst.DT, cfg.constraint);
        worst = std::max(worst, check.worst_slack);
        if (!check.ok) {
            detail += std::string(" FAIL[") + cfg.name + "]";
            ok = false;
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), " worst_slack=%.3g", worst);
    detail += buf;
    return ok;
}

// 6. Hedging identities: FD delta, the Merton constant, terminal limits.
bool criterion6(std::string& detail) {
    bool ok = true;
    const LognormalLaw law = terminal_density_law(kMkt);
    std::mt19937_64 rng(606);
    for (const NamedConfig& cfg : regime_battery()) {
        const Solution sol = solve(kMkt, cfg.inst, kU, cfg.constraint);
        for (int it = 0; it < 200; ++it) {
            const double t = 0.95 * kMkt.T * uniform01(rng);
            const double xi = sample_lognormal(law, rng);
            const double h = 1e-5 * xi;
            const double fd = -kMkt.theta() * xi *
                              (wealth_pre_horizon(sol, kMkt, kU, t, xi + h) -
                               wealth_pre_horizon(sol, kMkt, kU, t, xi - h)) /
                              (2.0 * h);
            const double an = risky_exposure(sol, kMkt, kU, t, xi);
            if (std::fabs(an - fd) > 1e-4 * (1.0 + std::fabs(an))) {
                detail += std::string(" FD-FAIL[") + cfg.name + "]";
                ok = false;
                break;
            }
        }
    }

    const Solution merton = solve_benchmark(kMkt, Institution(100.0, 0.0), kU);
    for (double xi : {0.3, 1.0, 2.5}) {
        if (std::fabs(strategy_pre_horizon(merton, kMkt, kU, 0.37, xi) - 2.5) > 1e-10) {
            detail += " MERTON-FAIL";
            ok = false;
        }
    }

    const Solution bench = solve_benchmark(kMkt, Institution(100.0, 100.0), kU);
    const double bd = bench.profile.boundaries()[0];
    const double t = kMkt.T - 1e-8;
    for (double xi : {bd * 0.4, bd * 0.9}) {
        const double xT = bench.profile.evaluate(xi);
        const double lim = 2.5 * (xT - 100.0) / xT;
        if (std::fabs(strategy_pre_horizon(bench, kMkt, kU, t, xi) - lim) > 1e-6) {
            detail += " LIMIT-FAIL";
            ok = false;
        }
    }
    for (double xi : {bd * 1.2, bd * 3.0}) {
        if (!(strategy_pre_horizon(bench, kMkt, kU, t, xi) > 1e3)) {
            detail += " DIVERGENCE-FAIL";
            ok = false;
        }
    }
    if (ok) detail = "FD delta, Merton constant and terminal limits verified";
    return ok;
}

// 7. Monte-Carlo replication of the benchmark and matched-ES solutions.
bool criterion7(std::string& detail) {
    const double t0 = now_s();
    bool ok = true;
    char buf[160];
    const Institution inst(100.0, 100.0);
    const Solution bench = solve_benchmark(kMkt, inst, kU);
    const Solution es = solve_es(kMkt, inst, kU, EsConstraint{90.0, 0.87});
    for (const Solution* sol : {&bench, &es}) {
        const auto rep = simulate_replication(*sol, kMkt, kU, 100000, 250, 42);
        const auto rep2 = simulate_replication(*sol, kMkt, kU, 100000, 250, 42);
        const bool deterministic = rep.rmse == rep2.rmse;
        const bool within = rep.rmse <= 0.01 * inst.x0;
        std::snprintf(buf, sizeof(buf), " rmse=%.4f (tol 1.0) drift=%.2e det=%d;",
                      rep.rmse, rep.mean_abs_budget_drift, deterministic ? 1 : 0);
        detail += buf;
        ok = ok && within && deterministic;
    }
    const double dt = now_s() - t0;
    std::snprintf(buf, sizeof(buf), " %.1fs (budget 120s)", dt);
    detail += buf;
    return ok && dt < 120.0;
}

// 8. Regulation reduces the default probability; default wealth stays zero.
bool criterion8(std::string& detail) {
    bool ok = true;
    const VarConstraint c{90.0, 0.005};
    const double x0_min = feasibility_min(kMkt, c);
    int binding = 0;
    for (int k = 0; k < 10; ++k) {
        const double x0 = x0_min * 1.02 + (440.0 - x0_min * 1.02) * k / 9.0;
        const Institution inst(x0, 100.0);
        const Solution constrained = solve_var(kMkt, inst, kU, c);
        const Solution bench = solve_benchmark(kMkt, inst, kU);
        if (constrained.diagnostics.default_prob >
            bench.diagnostics.default_prob + 1e-10) {
            detail += " MONOTONE-FAIL";
            ok = false;
        }
        if (constrained.regime.find("slack") == std::string::npos) {
            ++binding;
            const double tail = constrained.profile.boundaries().back() * 2.0;
            if (constrained.profile.evaluate(tail) != 0.0) {
                detail += " DEFAULT-WEALTH-FAIL";
                ok = false;
            }
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "10-point sweep, %d binding", binding);
    detail = buf + detail;
    return ok && binding == 10;
}

const Criterion kCriteria[] = {
    {1, "equivalence table reproduction (alpha -> epsilon/x0)", criterion1},
    {2, "matched VaR/ES solutions coincide on randomized configs", criterion2},
    {3, "500-atom oracle crosscheck per regime", criterion3},
    {4, "binding diagnostics (budget / default prob / shortfall)", criterion4},
    {5, "pointwise Lagrangian optimality", criterion5},
    {6, "hedging identities and limits", criterion6},
    {7, "Monte-Carlo replication", criterion7},
    {8, "regulation reduces the default probability", criterion8},
};

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::strcmp(argv[i], "--criterion") == 0) only = std::atoi(argv[i + 1]);

    int failures = 0;
    for (const Criterion& c : kCriteria) {
        if (only != 0 && c.id != only) continue;
        std::string detail;
        bool ok = false;
        try {
            ok = c.fn(detail);
        } catch (const std::exception& e) {
            detail += std::string(" exception: ") + e.what();
        }
        std::printf("[%s] criterion %d: %s :: %s\n", ok ? "PASS" : "FAIL", c.id,
                    c.title, detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures;
}
