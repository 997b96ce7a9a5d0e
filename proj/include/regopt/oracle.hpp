#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "regopt/solver.hpp"

namespace regopt {

/// One probability atom of the discretized state price density.
struct Atom {
    double xi;
    double p;
};

/// Discrete instance for the brute-force dual verifier.
struct OracleInstance {
    std::vector<Atom> atoms;          ///< sorted by xi, probabilities sum to 1
    std::vector<double> wealth_grid;  ///< sorted static candidate levels
    RiskConstraint constraint;
    double x0 = 0.0;
    double DT = 0.0;
    double gamma = 0.5;
};

/// Stratified discretization of `law` into n_states atoms: atom i is the
/// conditional mean of its probability stratum, p_i = 1/n_states. Preserves
/// E[xi] exactly up to floating point.
std::vector<Atom> discretize(const LognormalLaw& law, std::int64_t n_states);

/// Builds the instance for a solved configuration: atoms plus a wealth grid of
/// log-spaced levels on [0, 20 x0 e^{rT}] augmented per atom with the analytic
/// candidates {0, L, I(lambda xi)+DT, I((lambda-lambda2) xi)+DT}.
OracleInstance make_instance(const MarketParams& mkt, const Institution& inst,
                             const CrraUtility& u, const RiskConstraint& constraint,
                             std::int64_t n_states, std::int64_t n_grid = 2000);

// A stratum whose mass is divided between two tied argmax branches so a
// constraint binds exactly. The stratum is a continuum underneath, so the
// split is the discrete image of the continuous solution crossing inside it.
struct SplitShare {
    std::int64_t atom = -1;
    double x = 0.0; ///< alternative branch value
    double w = 0.0; ///< mass fraction moved to x
};

struct OracleSolution {
    std::vector<double> allocation; ///< per-atom optimal wealth (majority branch)
    std::vector<SplitShare> splits; ///< marginal strata (at most one per margin)
    double lambda_budget = 0.0;
    double lambda_risk = 0.0; ///< 0 when the risk constraint is slack
    double expected_utility = 0.0;
    double budget = 0.0;
    double shortfall = 0.0;   ///< ES functional (ES instances)
    double prob_below = 0.0;  ///< P(X < L) (VaR instances)
    double dual_bound = 0.0;  ///< dual objective at the returned multipliers
};

/// Solves the discrete constrained program by pointwise-Lagrangian dual
/// search over the wealth grid. Throws InfeasibleError below the discrete
/// feasibility minimum.
OracleSolution oracle_solve(const OracleInstance& inst);

struct CrosscheckReport {
    double utility_gap = 0.0;     ///< |EU_closed - EU_oracle| / |EU_closed|
    double profile_sup_gap = 0.0; ///< max atom gap / x0, off region boundaries
    std::int64_t boundary_atoms = 0; ///< atoms skipped as boundary-straddling
    std::int64_t bands = 0;       ///< contiguous branch bands in the allocation
    bool pass = false;
    std::string detail;
};

/// Compares a closed-form Solution against the oracle on `inst`. Atoms whose
/// stratum straddles a profile region boundary are excluded from the sup gap
/// (branch assignment there is a coin flip at atom resolution) and counted.
CrosscheckReport crosscheck(const Solution& sol, const OracleInstance& inst,
                            double utility_tol = 1e-3, double profile_tol = 1e-2);

} // namespace regopt
