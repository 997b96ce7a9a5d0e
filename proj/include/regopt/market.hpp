#pragma once

#include <limits>

namespace regopt {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Black-Scholes market with one risky asset and a constant risk free rate.
/// Rates are annual, the horizon T is in years.
struct MarketParams {
    double mu;    ///< drift of the risky asset
    double r;     ///< risk free rate
    double sigma; ///< volatility, per sqrt(year)
    double T;     ///< horizon in years

    MarketParams(double mu_, double r_, double sigma_, double T_);

    /// Market price of risk (mu - r) / sigma.
    double theta() const { return (mu - r) / sigma; }
};

/// Lognormal law: Y = exp(Z) with Z ~ N(m, s^2), s > 0.
struct LognormalLaw {
    double m; ///< log mean
    double s; ///< log standard deviation

    LognormalLaw(double m_, double s_);

    double mean() const;

    /// Median, exp(m).
    double median() const;
};

/// Law of the terminal state price density xi_T under `mkt`:
/// LN(-(r + theta^2/2) T, theta^2 T).
LognormalLaw terminal_density_law(const MarketParams& mkt);

/// Law of xi_T / xi_t over the remaining horizon [t, T), t < T.
LognormalLaw remaining_density_law(const MarketParams& mkt, double t);

/// E[Y^power 1_{a < Y < b}] for Y ~ law, in closed form. Bounds a = 0 and
/// b = +inf select the full support on that side. Requires 0 <= a <= b.
double truncated_mean(const LognormalLaw& law, double power, double a, double b);

/// The threshold q with P(Y > q) = alpha. alpha = 0 maps to +inf, alpha = 1
/// to 0. Requires alpha in [0, 1].
double quantile_threshold(const LognormalLaw& law, double alpha);

} // namespace regopt
