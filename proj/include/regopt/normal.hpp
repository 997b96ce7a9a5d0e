#pragma once

namespace regopt {

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal cumulative distribution, accurate to machine precision
/// (erfc based) including the far tails.
double normal_cdf(double x);

/// Inverse of normal_cdf on (0,1). Throws std::domain_error outside (0,1).
double normal_quantile(double p);

} // namespace regopt
