#pragma once

#include <functional>

namespace regopt {

/// Options for the bracketed bisection helpers.
struct BisectOptions {
    double x_tol = 1e-12;   ///< absolute tolerance on the root location
    double f_tol = 0.0;     ///< optional tolerance on |f|
    int max_iter = 200;
};

/// Bisection on [lo, hi]; f must change sign on the bracket (else
/// std::invalid_argument). Returns the midpoint of the final bracket.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              const BisectOptions& opt = {});

/// Bisection in log space over positive arguments, for multiplier searches
/// spanning many decades. Stops when the bracket is relatively tight or
/// |f| <= f_tol.
double bisect_log(const std::function<double(double)>& f, double lo, double hi,
                  double rel_tol = 1e-13, double f_tol = 0.0, int max_iter = 300);

} // namespace regopt
