#include "regopt/equivalence.hpp"

#include <cmath>
#include <stdexcept>

#include "regopt/normal.hpp"

namespace regopt {

double epsilon_for_alpha(const MarketParams& mkt, double L, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::domain_error("epsilon_for_alpha: alpha must lie in [0,1]");
    if (L < 0.0) throw std::domain_error("epsilon_for_alpha: L must be >= 0");
    const double disc = L * std::exp(-mkt.r * mkt.T);
    if (alpha <= 0.0) return 0.0;
    if (alpha >= 1.0) return disc;
    const double sq = mkt.theta() * std::sqrt(mkt.T);
    return disc * (1.0 - normal_cdf(normal_quantile(1.0 - alpha) - sq));
}

double alpha_for_epsilon(const MarketParams& mkt, double L, double epsilon) {
    const double disc = L * std::exp(-mkt.r * mkt.T);
    if (epsilon < 0.0 || epsilon > disc * (1.0 + 1e-12))
        throw std::domain_error("alpha_for_epsilon: epsilon must lie in [0, L e^{-rT}]");
    if (epsilon <= 0.0) return 0.0;
    if (epsilon >= disc) return 1.0;
    const double sq = mkt.theta() * std::sqrt(mkt.T);
    return 1.0 - normal_cdf(normal_quantile(1.0 - epsilon / disc) + sq);
}

std::vector<EquivalenceRow> equivalence_table(const MarketParams& mkt, double x0,
                                              double L,
                                              const std::vector<double>& alphas) {
    if (!(x0 > 0.0)) throw std::domain_error("equivalence_table: x0 must be > 0");
    std::vector<EquivalenceRow> rows;
    rows.reserve(alphas.size());
    for (double a : alphas) {
        const double eps = epsilon_for_alpha(mkt, L, a);
        rows.push_back(EquivalenceRow{a, eps, eps / x0});
    }
    return rows;
}

} // namespace regopt
