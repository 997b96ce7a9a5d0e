#pragma once

#include <variant>
#include <vector>

#include "regopt/market.hpp"
#include "regopt/utility.hpp"

namespace regopt {

/// X(xi) = (lambda_eff * xi)^{-1/gamma} + shift on the region.
struct PowerBranch {
    double lambda_eff;
    double shift;
};

/// X(xi) = level on the region.
struct ConstantBranch {
    double level;
};

/// X(xi) = 0 on the region (complete default).
struct ZeroBranch {};

using Branch = std::variant<PowerBranch, ConstantBranch, ZeroBranch>;

/// Half-open state region [lo, hi) with its wealth branch.
struct Region {
    double lo;
    double hi;
    Branch branch;
};

/// Piecewise terminal wealth xi_T -> X_T. Regions partition [0, inf), are
/// left-closed/right-open, and the map is non-increasing in xi.
class WealthProfile {
  public:
    WealthProfile(double gamma, std::vector<Region> regions);

    double gamma() const { return gamma_; }
    const std::vector<Region>& regions() const { return regions_; }

    /// Wealth at state price density level xi >= 0.
    double evaluate(double xi) const;

    /// Interior region boundaries (excludes 0 and +inf).
    std::vector<double> boundaries() const;

  private:
    double gamma_;
    std::vector<Region> regions_;
};

/// E[xi X(xi)] under `law`, in closed form per region.
double budget(const WealthProfile& profile, const LognormalLaw& law);

/// P(X(xi) = 0): mass of the zero-wealth (complete default) regions.
double default_probability(const WealthProfile& profile, const LognormalLaw& law);

/// P(X(xi) < L): mass below the regulatory threshold.
double probability_below(const WealthProfile& profile, const LognormalLaw& law,
                         double L);

/// E[xi (L - X)^+ 1_{X < L}]: the discounted expected shortfall below L.
double expected_shortfall(const WealthProfile& profile, const LognormalLaw& law,
                          double L);

/// E[U((X - DT)^+)]. Power branches must carry shift == DT (all profiles
/// produced by the solvers do).
double expected_utility(const WealthProfile& profile, const LognormalLaw& law,
                        const CrraUtility& u, double DT);

} // namespace regopt
