#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "regopt/profile.hpp"

namespace regopt {

/// The institution's balance sheet: initial assets x0 and terminal debt DT.
struct Institution {
    double x0; ///< initial wealth, > 0
    double DT; ///< terminal debt level, >= 0

    Institution(double x0_, double DT_);

    /// Builds DT = D0 exp(g T); requires DT >= D0 exp(r T), i.e. g >= r.
    static Institution from_growth(double x0, double D0, double g,
                                   const MarketParams& mkt);
};

struct NoConstraint {};

/// P(X_T < L) <= alpha.
struct VarConstraint {
    double L;
    double alpha;
};

/// E[xi_T (L - X_T) 1_{X_T < L}] <= epsilon.
struct EsConstraint {
    double L;
    double epsilon;
};

using RiskConstraint = std::variant<NoConstraint, VarConstraint, EsConstraint>;

/// Thrown when x0 is below the feasibility minimum of the constraint.
class InfeasibleError : public std::runtime_error {
  public:
    InfeasibleError(double x0, double x0_min);
    double x0;
    double x0_min;
};

struct Diagnostics {
    double budget = 0.0;
    double default_prob = 0.0;            ///< P(X_T = 0)
    double prob_below_threshold = 0.0;    ///< P(X_T < L); NaN without constraint
    double expected_shortfall = 0.0;      ///< ES functional; NaN without constraint
    double expected_utility = 0.0;
    double x0_min = 0.0;                  ///< feasibility minimum
    double x0_slack = kInfinity;          ///< wealth above which the constraint is slack
};

struct Solution {
    WealthProfile profile;
    double lambda_budget;                ///< multiplier of the budget constraint
    std::optional<double> lambda_risk;   ///< multiplier of the risk constraint
    std::string regime;                  ///< e.g. "ES-a-threeregion", "VaR-c-slack"
    Diagnostics diagnostics;
};

/// Feasibility minimum of the constraint: ES -> L e^{-rT} - epsilon (floored
/// at 0); VaR -> E[L xi 1_{xi < quantile_threshold(alpha)}]. None -> 0.
double feasibility_min(const MarketParams& mkt, const RiskConstraint& constraint);

/// Unconstrained problem: power payoff above the tangent level, complete
/// default beyond. Budget binds.
Solution solve_benchmark(const MarketParams& mkt, const Institution& inst,
                         const CrraUtility& u);

/// VaR constrained problem.
Solution solve_var(const MarketParams& mkt, const Institution& inst,
                   const CrraUtility& u, const VarConstraint& c);

/// ES (limited expected loss) constrained problem.
Solution solve_es(const MarketParams& mkt, const Institution& inst,
                  const CrraUtility& u, const EsConstraint& c);

/// Dispatch on the constraint tag.
Solution solve(const MarketParams& mkt, const Institution& inst,
               const CrraUtility& u, const RiskConstraint& constraint);

} // namespace regopt
