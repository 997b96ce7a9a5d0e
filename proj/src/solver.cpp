#include "regopt/solver.hpp"

#include <cmath>

#include "regopt/normal.hpp"
#include "regopt/roots.hpp"

namespace regopt {

namespace {

constexpr double kLambdaLo = 1e-12;
constexpr double kLambdaHi = 1e12;
constexpr double kBudgetRelTol = 1e-12;

struct Context {
    MarketParams mkt;
    LognormalLaw law;
    Institution inst;
    CrraUtility u;
    double tangent_level;   // hat_DT, the concavification level of the debt
    double tangent_marginal; // U'(hat_DT - DT); +inf when DT == 0

    Context(const MarketParams& m, const Institution& i, const CrraUtility& uu)
        : mkt(m), law(terminal_density_law(m)), inst(i), u(uu),
          tangent_level(tangent_point(uu, i.DT).hat_d),
          tangent_marginal(i.DT > 0.0 ? uu.marginal(tangent_level - i.DT)
                                      : kInfinity) {}

    // Default boundary of the unconstrained payoff at multiplier lambda.
    double benchmark_boundary(double lambda) const {
        return tangent_marginal / lambda; // +inf when DT == 0
    }
};

void push_region(std::vector<Region>& regs, double lo, double hi, Branch br) {
    if (lo < hi) regs.push_back(Region{lo, hi, std::move(br)});
}

WealthProfile benchmark_profile(const Context& ctx, double lambda) {
    std::vector<Region> regs;
    const double b = ctx.benchmark_boundary(lambda);
    push_region(regs, 0.0, b, PowerBranch{lambda, ctx.inst.DT});
    push_region(regs, b, kInfinity, ZeroBranch{});
    return WealthProfile(ctx.u.gamma, std::move(regs));
}

// Power-then-insured-then-default family shared by the ES and VaR binding
// cases with L <= hat_DT. `mid(lambda)` is the state level where the payoff
// drops onto the insured level L; the default tail starts at `bar`.
WealthProfile banded_profile(const Context& ctx, double lambda, double mid,
                             double bar, double L) {
    std::vector<Region> regs;
    const double a = std::min(mid, bar);
    push_region(regs, 0.0, a, PowerBranch{lambda, ctx.inst.DT});
    push_region(regs, a, bar, ConstantBranch{L});
    push_region(regs, bar, kInfinity, ZeroBranch{});
    return WealthProfile(ctx.u.gamma, std::move(regs));
}

// Four-band family of the ES case L > hat_DT: power, insured L, power with
// the reduced multiplier, default.
WealthProfile reduced_multiplier_profile(const Context& ctx, double lambda,
                                         double lambda2, double L) {
    const double lam_eff = lambda - lambda2;
    const double lo_mid = ctx.u.marginal(L - ctx.inst.DT) / lambda;
    const double hi_mid = ctx.u.marginal(L - ctx.inst.DT) / lam_eff;
    const double tail = ctx.tangent_marginal / lam_eff;
    std::vector<Region> regs;
    push_region(regs, 0.0, lo_mid, PowerBranch{lambda, ctx.inst.DT});
    push_region(regs, lo_mid, hi_mid, ConstantBranch{L});
    push_region(regs, hi_mid, tail, PowerBranch{lam_eff, ctx.inst.DT});
    push_region(regs, tail, kInfinity, ZeroBranch{});
    return WealthProfile(ctx.u.gamma, std::move(regs));
}

// VaR family for L > hat_DT: power, insured L up to the quantile boundary,
// then the uninsured continuation of the same power payoff, then default.
WealthProfile var_high_threshold_profile(const Context& ctx, double lambda,
                                         double bar, double L) {
    const double mid = std::min(ctx.u.marginal(L - ctx.inst.DT) / lambda, bar);
    const double tail = ctx.benchmark_boundary(lambda);
    std::vector<Region> regs;
    push_region(regs, 0.0, mid, PowerBranch{lambda, ctx.inst.DT});
    push_region(regs, mid, bar, ConstantBranch{L});
    if (tail > bar) {
        push_region(regs, bar, tail, PowerBranch{lambda, ctx.inst.DT});
        push_region(regs, tail, kInfinity, ZeroBranch{});
    } else {
        push_region(regs, bar, kInfinity, ZeroBranch{});
    }
    return WealthProfile(ctx.u.gamma, std::move(regs));
}

double solve_budget_multiplier(const Context& ctx,
                               const std::function<WealthProfile(double)>& family,
                               double lo = kLambdaLo, double hi = kLambdaHi) {
    const double x0 = ctx.inst.x0;
    auto gap = [&](double lambda) { return budget(family(lambda), ctx.law) - x0; };
    return bisect_log(gap, lo, hi, 1e-15, x0 * kBudgetRelTol);
}

// State level where the payoff drops to the insured level, for L <= hat_DT.
// Case a (L <= DT) concavifies the gap DT - L; case b uses the marginal at
// L - DT directly.
double insured_drop_boundary(const Context& ctx, double lambda, double L) {
    const double DT = ctx.inst.DT;
    if (L <= DT) {
        const double d = DT - L;
        if (d == 0.0) return kInfinity; // nested limit: no drop before the tail
        const TangentPoint tp = tangent_point(ctx.u, d);
        return ctx.u.marginal(tp.hat_d - d) / lambda;
    }
    return ctx.u.marginal(L - DT) / lambda;
}

char case_label(const Context& ctx, double L) {
    if (L <= ctx.inst.DT) return 'a';
    if (L <= ctx.tangent_level) return 'b';
    return 'c';
}

Diagnostics make_diagnostics(const Context& ctx, const WealthProfile& profile,
                             const RiskConstraint& constraint, double x0_min,
                             double x0_slack) {
    Diagnostics d;
    d.budget = budget(profile, ctx.law);
    d.default_prob = default_probability(profile, ctx.law);
    d.expected_utility = expected_utility(profile, ctx.law, ctx.u, ctx.inst.DT);
    d.x0_min = x0_min;
    d.x0_slack = x0_slack;
    double L = std::numeric_limits<double>::quiet_NaN();
    if (const auto* v = std::get_if<VarConstraint>(&constraint)) L = v->L;
    if (const auto* e = std::get_if<EsConstraint>(&constraint)) L = e->L;
    if (std::isnan(L)) {
        d.prob_below_threshold = std::numeric_limits<double>::quiet_NaN();
        d.expected_shortfall = std::numeric_limits<double>::quiet_NaN();
    } else {
        d.prob_below_threshold = probability_below(profile, ctx.law, L);
        d.expected_shortfall = expected_shortfall(profile, ctx.law, L);
    }
    return d;
}

// Budget of the degenerate profile at which the binding family meets the
// unconstrained one: a power payoff with its default boundary exactly at
// `bar`, i.e. multiplier U'(hat_DT - DT)/bar. This is the x0^k threshold of
// the a/b cases.
double slack_threshold_low(const Context& ctx, double bar) {
    if (std::isinf(bar)) return kInfinity;
    if (bar <= 0.0) return 0.0;
    const double lambda = ctx.tangent_marginal / bar;
    std::vector<Region> regs;
    push_region(regs, 0.0, bar, PowerBranch{lambda, ctx.inst.DT});
    push_region(regs, bar, kInfinity, ZeroBranch{});
    return budget(WealthProfile(ctx.u.gamma, std::move(regs)), ctx.law);
}

} // namespace

Institution::Institution(double x0_, double DT_) : x0(x0_), DT(DT_) {
    if (!(x0 > 0.0)) throw std::invalid_argument("Institution: x0 must be > 0");
    if (DT < 0.0) throw std::invalid_argument("Institution: DT must be >= 0");
}

Institution Institution::from_growth(double x0, double D0, double g,
                                     const MarketParams& mkt) {
    if (D0 < 0.0) throw std::invalid_argument("Institution: D0 must be >= 0");
    const double DT = D0 * std::exp(g * mkt.T);
    if (DT < D0 * std::exp(mkt.r * mkt.T) - 1e-12 * std::max(1.0, D0))
        throw std::invalid_argument(
            "Institution: debt must accrue at least the risk free rate");
    return Institution(x0, DT);
}

InfeasibleError::InfeasibleError(double x0_, double x0_min_)
    : std::runtime_error("infeasible: x0 below the feasibility minimum"),
      x0(x0_), x0_min(x0_min_) {}

double feasibility_min(const MarketParams& mkt, const RiskConstraint& constraint) {
    const LognormalLaw law = terminal_density_law(mkt);
    if (const auto* v = std::get_if<VarConstraint>(&constraint)) {
        const double bar = quantile_threshold(law, v->alpha);
        return v->L * truncated_mean(law, 1.0, 0.0, bar);
    }
    if (const auto* e = std::get_if<EsConstraint>(&constraint)) {
        return std::max(e->L * std::exp(-mkt.r * mkt.T) - e->epsilon, 0.0);
    }
    return 0.0;
}

Solution solve_benchmark(const MarketParams& mkt, const Institution& inst,
                         const CrraUtility& u) {
    Context ctx(mkt, inst, u);
    auto family = [&](double lambda) { return benchmark_profile(ctx, lambda); };
    const double lambda = solve_budget_multiplier(ctx, family);
    WealthProfile profile = family(lambda);
    Diagnostics diag = make_diagnostics(ctx, profile, NoConstraint{}, 0.0, 0.0);
    return Solution{std::move(profile), lambda, std::nullopt, "benchmark", diag};
}

Solution solve_var(const MarketParams& mkt, const Institution& inst,
                   const CrraUtility& u, const VarConstraint& c) {
    if (!(c.alpha >= 0.0 && c.alpha <= 1.0))
        throw std::invalid_argument("solve_var: alpha must lie in [0,1]");
    if (c.L < 0.0) throw std::invalid_argument("solve_var: L must be >= 0");
    Context ctx(mkt, inst, u);
    const RiskConstraint rc = c;
    const double x0_min = feasibility_min(mkt, rc);
    if (inst.x0 < x0_min * (1.0 - 1e-12)) throw InfeasibleError(inst.x0, x0_min);

    const char cs = case_label(ctx, c.L);
    const double bar = quantile_threshold(ctx.law, c.alpha);
    std::string tag = std::string("VaR-") + cs;

    // Slack threshold: budget of the family member whose constraint just binds.
    double x0_slack;
    if (c.L <= 0.0) {
        x0_slack = 0.0; // wealth is never below 0: vacuous
    } else if (cs != 'c') {
        x0_slack = slack_threshold_low(ctx, bar);
    } else if (std::isinf(bar)) {
        x0_slack = kInfinity;
    } else if (bar <= 0.0) {
        x0_slack = 0.0;
    } else {
        // Benchmark budget at the multiplier whose payoff crosses L at bar.
        const double lam_star = u.marginal(c.L - inst.DT) / bar;
        x0_slack = budget(benchmark_profile(ctx, lam_star), ctx.law);
    }

    if (inst.x0 >= x0_slack * (1.0 - 1e-12)) {
        Solution sol = solve_benchmark(mkt, inst, u);
        Diagnostics diag = make_diagnostics(ctx, sol.profile, rc, x0_min, x0_slack);
        return Solution{std::move(sol.profile), sol.lambda_budget, 0.0,
                        tag + "-slack", diag};
    }

    double lambda = 0.0;
    WealthProfile profile(u.gamma, {Region{0.0, kInfinity, ZeroBranch{}}});
    std::string shape;
    if (cs != 'c') {
        auto family = [&](double lam) {
            return banded_profile(ctx, lam, insured_drop_boundary(ctx, lam, c.L),
                                  bar, c.L);
        };
        lambda = solve_budget_multiplier(ctx, family);
        profile = family(lambda);
        shape = insured_drop_boundary(ctx, lambda, c.L) < bar ? "threeregion"
                                                              : "tworegion";
    } else {
        auto family = [&](double lam) {
            return var_high_threshold_profile(ctx, lam, bar, c.L);
        };
        // The insured band requires the payoff to cross L before bar.
        double lo = kLambdaLo;
        if (!std::isinf(bar)) lo = std::max(lo, u.marginal(c.L - inst.DT) / bar);
        lambda = solve_budget_multiplier(ctx, family, lo);
        profile = family(lambda);
        shape = ctx.benchmark_boundary(lambda) > bar ? "fourregion" : "threeregion";
    }

    // Indicator-penalty multiplier making the drop to the default level
    // optimal exactly at bar; undefined for the hard constraint alpha = 0.
    std::optional<double> lambda2;
    if (c.alpha > 0.0) {
        if (cs == 'a' && shape == "tworegion") {
            lambda2 = -conjugate(u, inst.DT, lambda, bar);
        } else if (cs == 'a') {
            lambda2 = lambda * bar * c.L;
        } else if (shape == "tworegion") {
            lambda2 = -conjugate(u, inst.DT, lambda, bar);
        } else {
            lambda2 = lambda * bar * c.L - u.value(c.L - inst.DT);
            if (cs == 'c' && shape == "fourregion")
                lambda2 = conjugate(u, inst.DT, lambda, bar) + lambda * bar * c.L -
                          u.value(c.L - inst.DT);
        }
    }

    Diagnostics diag = make_diagnostics(ctx, profile, rc, x0_min, x0_slack);
    return Solution{std::move(profile), lambda, lambda2, tag + "-" + shape, diag};
}

Solution solve_es(const MarketParams& mkt, const Institution& inst,
                  const CrraUtility& u, const EsConstraint& c) {
    if (c.epsilon < 0.0) throw std::invalid_argument("solve_es: epsilon must be >= 0");
    if (c.L < 0.0) throw std::invalid_argument("solve_es: L must be >= 0");
    Context ctx(mkt, inst, u);
    const RiskConstraint rc = c;
    const double x0_min = feasibility_min(mkt, rc);
    if (inst.x0 < x0_min * (1.0 - 1e-12)) throw InfeasibleError(inst.x0, x0_min);

    const char cs = case_label(ctx, c.L);
    std::string tag = std::string("ES-") + cs;
    const double discounted_L = c.L * std::exp(-mkt.r * mkt.T);

    if (c.L <= 0.0) { // shortfall functional is identically zero
        Solution sol = solve_benchmark(mkt, inst, u);
        Diagnostics diag = make_diagnostics(ctx, sol.profile, rc, x0_min, 0.0);
        return Solution{std::move(sol.profile), sol.lambda_budget, 0.0,
                        tag + "-slack", diag};
    }

    // Default boundary from the shortfall budget alone:
    // E[L xi 1_{xi >= bar}] = epsilon.
    double bar;
    if (c.epsilon <= 0.0) {
        bar = kInfinity;
    } else if (c.epsilon >= discounted_L) {
        bar = 0.0; // constraint vacuous
    } else {
        const double q = c.epsilon / discounted_L;
        bar = std::exp(ctx.law.m + ctx.law.s * ctx.law.s +
                       ctx.law.s * normal_quantile(1.0 - q));
    }

    double x0_slack;
    if (cs != 'c') {
        x0_slack = slack_threshold_low(ctx, bar);
    } else if (c.epsilon <= 0.0) {
        x0_slack = kInfinity;
    } else {
        // Benchmark budget at the multiplier whose shortfall equals epsilon.
        auto bench_gap = [&](double lam) {
            return expected_shortfall(benchmark_profile(ctx, lam), ctx.law, c.L) -
                   c.epsilon;
        };
        const double hi_sf = bench_gap(kLambdaHi);
        if (hi_sf <= 0.0) {
            x0_slack = 0.0; // even the poorest benchmark satisfies the budget
        } else {
            const double lam_bar =
                bisect_log(bench_gap, kLambdaLo, kLambdaHi, 1e-15, c.epsilon * 1e-12);
            x0_slack = budget(benchmark_profile(ctx, lam_bar), ctx.law);
        }
    }

    if (inst.x0 >= x0_slack * (1.0 - 1e-12)) {
        Solution sol = solve_benchmark(mkt, inst, u);
        Diagnostics diag = make_diagnostics(ctx, sol.profile, rc, x0_min, x0_slack);
        return Solution{std::move(sol.profile), sol.lambda_budget, 0.0,
                        tag + "-slack", diag};
    }

    if (cs != 'c') {
        auto family = [&](double lam) {
            return banded_profile(ctx, lam, insured_drop_boundary(ctx, lam, c.L),
                                  bar, c.L);
        };
        const double lambda = solve_budget_multiplier(ctx, family);
        WealthProfile profile = family(lambda);
        const bool three = insured_drop_boundary(ctx, lambda, c.L) < bar;
        double lambda2;
        if (three) {
            lambda2 = cs == 'a' ? lambda
                                : lambda - u.value(c.L - inst.DT) / (bar * c.L);
        } else {
            lambda2 = -conjugate(u, inst.DT, lambda, bar) / (bar * c.L);
        }
        Diagnostics diag = make_diagnostics(ctx, profile, rc, x0_min, x0_slack);
        return Solution{std::move(profile), lambda, lambda2,
                        tag + (three ? "-threeregion" : "-tworegion"), diag};
    }

    if (c.epsilon <= 0.0) {
        // Hard floor at L: the limit lambda2 -> lambda of the four-band
        // family, a power payoff insured at L on the whole tail.
        auto family = [&](double lam) {
            return banded_profile(ctx, lam, u.marginal(c.L - inst.DT) / lam,
                                  kInfinity, c.L);
        };
        const double lambda = solve_budget_multiplier(ctx, family);
        WealthProfile profile = family(lambda);
        Diagnostics diag = make_diagnostics(ctx, profile, rc, x0_min, x0_slack);
        return Solution{std::move(profile), lambda, lambda, tag + "-insured", diag};
    }

    // Case c: nested search. Inner root in lambda2 makes the shortfall bind
    // for a fixed budget multiplier; the outer root matches the budget.
    auto inner_lambda2 = [&](double lambda) -> double {
        auto sf_gap = [&](double l2) {
            return expected_shortfall(reduced_multiplier_profile(ctx, lambda, l2, c.L),
                                      ctx.law, c.L) -
                   c.epsilon;
        };
        const double slack_sf =
            expected_shortfall(benchmark_profile(ctx, lambda), ctx.law, c.L);
        if (slack_sf <= c.epsilon) return 0.0;
        return bisect_log(sf_gap, lambda * 1e-15, lambda * (1.0 - 1e-14), 1e-15,
                          std::max(c.epsilon, 1e-30) * 1e-12);
    };
    auto family = [&](double lambda) {
        const double l2 = inner_lambda2(lambda);
        return l2 > 0.0 ? reduced_multiplier_profile(ctx, lambda, l2, c.L)
                        : benchmark_profile(ctx, lambda);
    };
    const double lambda = solve_budget_multiplier(ctx, family);
    const double lambda2 = inner_lambda2(lambda);
    WealthProfile profile = family(lambda);
    Diagnostics diag = make_diagnostics(ctx, profile, rc, x0_min, x0_slack);
    return Solution{std::move(profile), lambda, lambda2, tag + "-fourregion", diag};
}

Solution solve(const MarketParams& mkt, const Institution& inst,
               const CrraUtility& u, const RiskConstraint& constraint) {
    if (const auto* v = std::get_if<VarConstraint>(&constraint))
        return solve_var(mkt, inst, u, *v);
    if (const auto* e = std::get_if<EsConstraint>(&constraint))
        return solve_es(mkt, inst, u, *e);
    return solve_benchmark(mkt, inst, u);
}

} // namespace regopt
