#include "regopt/market.hpp"

#include <cmath>
#include <stdexcept>

#include "regopt/normal.hpp"

namespace regopt {

namespace {
// Beyond |x| = 38 the normal cdf is 0 or 1 to double precision; clamping
// keeps tail regions free of inf/nan arithmetic.
constexpr double kPhiArgClamp = 38.0;

double clamped_cdf(double x) {
    if (x >= kPhiArgClamp) return 1.0;
    if (x <= -kPhiArgClamp) return 0.0;
    return normal_cdf(x);
}
} // namespace

MarketParams::MarketParams(double mu_, double r_, double sigma_, double T_)
    : mu(mu_), r(r_), sigma(sigma_), T(T_) {
    if (!(sigma > 0.0)) throw std::invalid_argument("MarketParams: sigma must be > 0");
    if (!(T > 0.0)) throw std::invalid_argument("MarketParams: T must be > 0");
    if (!std::isfinite(theta())) throw std::invalid_argument("MarketParams: theta not finite");
}

LognormalLaw::LognormalLaw(double m_, double s_) : m(m_), s(s_) {
    if (!(s > 0.0)) throw std::invalid_argument("LognormalLaw: s must be > 0");
    if (!std::isfinite(mean())) throw std::invalid_argument("LognormalLaw: mean not finite");
}

double LognormalLaw::mean() const { return std::exp(m + 0.5 * s * s); }

double LognormalLaw::median() const { return std::exp(m); }

LognormalLaw terminal_density_law(const MarketParams& mkt) {
    const double th = mkt.theta();
    return LognormalLaw{-(mkt.r + 0.5 * th * th) * mkt.T, th * std::sqrt(mkt.T)};
}

LognormalLaw remaining_density_law(const MarketParams& mkt, double t) {
    if (!(t >= 0.0 && t < mkt.T))
        throw std::domain_error("remaining_density_law: t must lie in [0, T)");
    const double tau = mkt.T - t;
    const double th = mkt.theta();
    return LognormalLaw{-(mkt.r + 0.5 * th * th) * tau, th * std::sqrt(tau)};
}

double truncated_mean(const LognormalLaw& law, double power, double a, double b) {
    if (!(a >= 0.0) || a > b)
        throw std::domain_error("truncated_mean: bounds must satisfy 0 <= a <= b");
    if (a == b) return 0.0;
    // j(x) standardizes ln(x) under the power-tilted law.
    auto j = [&](double x) {
        if (x <= 0.0) return -kPhiArgClamp;
        if (std::isinf(x)) return kPhiArgClamp;
        return (std::log(x) - law.m - power * law.s * law.s) / law.s;
    };
    const double scale = std::exp(power * law.m + 0.5 * power * power * law.s * law.s);
    return scale * (clamped_cdf(j(b)) - clamped_cdf(j(a)));
}

double quantile_threshold(const LognormalLaw& law, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::domain_error("quantile_threshold: alpha must be in [0,1]");
    if (alpha <= 0.0) return kInfinity;
    if (alpha >= 1.0) return 0.0;
    return std::exp(law.m + law.s * normal_quantile(1.0 - alpha));
}

} // namespace regopt
