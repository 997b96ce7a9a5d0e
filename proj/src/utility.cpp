#include "regopt/utility.hpp"

#include <cmath>
#include <stdexcept>

#include "regopt/roots.hpp"

namespace regopt {

CrraUtility::CrraUtility(double gamma_) : gamma(gamma_) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("CrraUtility: gamma must lie in (0,1)");
}

double CrraUtility::value(double x) const {
    if (x < 0.0) throw std::domain_error("CrraUtility::value: x must be >= 0");
    if (x == 0.0) return 0.0;
    return std::pow(x, 1.0 - gamma) / (1.0 - gamma);
}

double CrraUtility::marginal(double x) const {
    if (!(x > 0.0)) {
        if (x == 0.0) return kInfinity; // Inada
        throw std::domain_error("CrraUtility::marginal: x must be >= 0");
    }
    return std::pow(x, -gamma);
}

double CrraUtility::inverse_marginal(double y) const {
    if (!(y > 0.0)) throw std::domain_error("CrraUtility::inverse_marginal: y must be > 0");
    return std::pow(y, -1.0 / gamma);
}

TangentPoint tangent_point(const CrraUtility& u, double d) {
    if (d < 0.0) throw std::domain_error("tangent_point: d must be >= 0");
    if (d == 0.0) return TangentPoint{0.0, 0.0}; // no concavification needed
    return TangentPoint{d, d / u.gamma};
}

double tangent_point_generic(const CrraUtility& u, double d) {
    if (!(d > 0.0)) throw std::domain_error("tangent_point_generic: d must be > 0");
    // g(x) = U(x-d) - x U'(x-d) crosses zero exactly once on (d, inf).
    auto g = [&](double x) { return u.value(x - d) - x * u.marginal(x - d); };
    double lo = d * (1.0 + 1e-12);
    double hi = 2.0 * d;
    while (g(hi) < 0.0) hi *= 2.0;
    BisectOptions opt;
    opt.x_tol = 1e-12 * d;
    return bisect(g, lo, hi, opt);
}

double conjugate(const CrraUtility& u, double d, double lambda, double y) {
    if (!(lambda > 0.0 && y > 0.0))
        throw std::domain_error("conjugate: lambda and y must be > 0");
    const double z = u.inverse_marginal(lambda * y);
    return u.value(z) - lambda * y * z - lambda * y * d;
}

std::optional<double> shifted_conjugate_zero(const CrraUtility& u, double d,
                                             double lambda, double lambda2,
                                             double l) {
    if (!(lambda > 0.0)) throw std::domain_error("shifted_conjugate_zero: lambda > 0");
    if (lambda2 < 0.0 || l < 0.0)
        throw std::domain_error("shifted_conjugate_zero: lambda2, l must be >= 0");
    const double shift = lambda2 * l / lambda - d;
    if (shift >= 0.0) return std::nullopt;
    // Zero at z = (1-gamma)/gamma * (-shift) in wealth terms, y = U'(z)/lambda.
    const double z = (1.0 - u.gamma) / u.gamma * (-shift);
    return u.marginal(z) / lambda;
}

double power_growth_exponent(const MarketParams& mkt, double gamma, double t) {
    if (!(t >= 0.0 && t < mkt.T))
        throw std::domain_error("power_growth_exponent: t must lie in [0, T)");
    const double tau = mkt.T - t;
    const double th = mkt.theta();
    const double p = 1.0 - 1.0 / gamma;
    return -(mkt.r + 0.5 * th * th) * tau * p + 0.5 * th * th * p * p * tau;
}

double tail_argument(const MarketParams& mkt, double t, double y) {
    if (!(t >= 0.0 && t < mkt.T))
        throw std::domain_error("tail_argument: t must lie in [0, T)");
    const double tau = mkt.T - t;
    const double th = mkt.theta();
    const double sq = th * std::sqrt(tau);
    return (std::log(y) + (mkt.r + 0.5 * th * th) * tau) / sq - sq;
}

double tail_argument_power(const MarketParams& mkt, double t, double y, double c) {
    const double tau = mkt.T - t;
    return tail_argument(mkt, t, y) + mkt.theta() * std::sqrt(tau) / c;
}

} // namespace regopt
