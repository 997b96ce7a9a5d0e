#pragma once

#include <cstdint>

#include "regopt/solver.hpp"

namespace regopt {

/// Wealth X_t at time t < T and state price density level xi_t, as the
/// conditional discounted expectation of the terminal profile. Closed form:
/// one lognormal tail term per profile region.
double wealth_pre_horizon(const Solution& sol, const MarketParams& mkt,
                          const CrraUtility& u, double t, double xi_t);

/// Dollar risk exposure pi_t sigma X_t = -theta xi_t dX_t/dxi_t, analytic.
/// Well defined even where X_t -> 0.
double risky_exposure(const Solution& sol, const MarketParams& mkt,
                      const CrraUtility& u, double t, double xi_t);

/// Optimal fraction of wealth in the risky asset. Returns +inf when X_t = 0
/// (the fraction diverges approaching the default region).
double strategy_pre_horizon(const Solution& sol, const MarketParams& mkt,
                            const CrraUtility& u, double t, double xi_t);

/// pi_t(constrained) / pi_t(benchmark) at the same (t, xi_t). Throws
/// std::domain_error when the benchmark fraction is zero.
double relative_risk_exposure(const Solution& constrained,
                              const Solution& benchmark, const MarketParams& mkt,
                              const CrraUtility& u, double t, double xi_t);

struct ReplicationReport {
    double rmse = 0.0;                  ///< RMSE of X_T^sim vs the profile
    double mean_abs_budget_drift = 0.0; ///< |mean(xi_T X_T^sim) - x0| / x0
    double budget_se = 0.0;             ///< standard error of that mean, / x0
    std::int64_t n_paths = 0;
    std::int64_t n_steps = 0;
    std::int64_t boundary_hits = 0;     ///< paths ending within 1e-3 rel of a boundary
};

/// Simulates state price density paths (exact lognormal increments), rolls the
/// wealth SDE forward with the analytic strategy (Euler), and compares the
/// simulated terminal wealth against the profile. Deterministic given seed;
/// paths are seeded independently so the parallel schedule cannot change the
/// result.
ReplicationReport simulate_replication(const Solution& sol,
                                       const MarketParams& mkt,
                                       const CrraUtility& u,
                                       std::int64_t n_paths,
                                       std::int64_t n_steps,
                                       std::uint64_t seed);

} // namespace regopt
