#pragma once

#include <optional>

#include "regopt/market.hpp"

namespace regopt {

/// Power utility U(x) = x^{1-gamma} / (1-gamma) with relative risk aversion
/// gamma in (0,1), so that U(0) = 0 and the Inada conditions hold.
struct CrraUtility {
    double gamma;

    explicit CrraUtility(double gamma_);

    double value(double x) const;           ///< U(x), x >= 0
    double marginal(double x) const;        ///< U'(x) = x^{-gamma}, x > 0
    double inverse_marginal(double y) const; ///< I(y) = y^{-1/gamma}, y > 0
};

/// Tangency data for the shifted utility U(x - d): the abscissa hat_d where
/// the ray from the origin touches U(x - d). For d = 0 there is no tangency
/// (degenerate() is true) and no jump in the optimal payoff.
struct TangentPoint {
    double d;     ///< shift, >= 0
    double hat_d; ///< tangent abscissa; equals d/gamma for CRRA

    bool degenerate() const { return d <= 0.0; }
};

/// Solves U(x-d)/x = U'(x-d) on (d, inf). Closed form d/gamma for CRRA,
/// cross-checked against the generic bisection in the tests.
TangentPoint tangent_point(const CrraUtility& u, double d);

/// Same tangency abscissa obtained purely by bracketed bisection on the
/// tangency equation (no CRRA closed form). Requires d > 0.
double tangent_point_generic(const CrraUtility& u, double d);

/// Conjugate c(y) = sup_{x>d} { U(x-d) - x lambda y }
///              = U(I(lambda y)) - lambda y I(lambda y) - lambda y d.
double conjugate(const CrraUtility& u, double d, double lambda, double y);

/// The unique zero of y -> sup_{x>d} { U(x-d) - x lambda y + lambda2 l y },
/// which exists iff lambda2 l / lambda - d < 0; otherwise nullopt.
std::optional<double> shifted_conjugate_zero(const CrraUtility& u, double d,
                                             double lambda, double lambda2,
                                             double l);

/// log E[(xi_T/xi_t)^{1-1/gamma}] over the remaining horizon; the growth
/// exponent of the power branch of a pre-horizon wealth. Requires 0 <= t < T.
double power_growth_exponent(const MarketParams& mkt, double gamma, double t);

/// Standardized tail argument for P(xi_T/xi_t < y) type probabilities:
/// (ln y + (r + theta^2/2)(T-t)) / (theta sqrt(T-t)) - theta sqrt(T-t).
double tail_argument(const MarketParams& mkt, double t, double y);

/// Tail argument shifted for the power moment: tail_argument + theta
/// sqrt(T-t) / c.
double tail_argument_power(const MarketParams& mkt, double t, double y, double c);

} // namespace regopt
