#pragma once

#include <vector>

#include "regopt/market.hpp"

namespace regopt {

struct EquivalenceRow {
    double alpha;
    double epsilon;     ///< absolute shortfall budget
    double epsilon_pct; ///< epsilon / x0, as a fraction
};

/// The shortfall budget that makes the ES constraint bind on the same states
/// as the VaR constraint at confidence alpha:
/// epsilon(alpha) = L e^{-rT} (1 - Phi(Phi^{-1}(1-alpha) - theta sqrt(T))).
double epsilon_for_alpha(const MarketParams& mkt, double L, double alpha);

/// Inverse of epsilon_for_alpha; requires 0 <= epsilon <= L e^{-rT}.
double alpha_for_epsilon(const MarketParams& mkt, double L, double epsilon);

/// One row per alpha, epsilon_pct relative to x0.
std::vector<EquivalenceRow> equivalence_table(const MarketParams& mkt, double x0,
                                              double L,
                                              const std::vector<double>& alphas);

} // namespace regopt
