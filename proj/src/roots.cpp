#include "regopt/roots.hpp"

#include <cmath>
#include <stdexcept>

namespace regopt {

double bisect(const std::function<double(double)>& f, double lo, double hi,
              const BisectOptions& opt) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument("bisect: no sign change on the bracket");
    for (int i = 0; i < opt.max_iter; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0 || (opt.f_tol > 0.0 && std::fabs(fm) <= opt.f_tol)) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo <= opt.x_tol) break;
    }
    return 0.5 * (lo + hi);
}

double bisect_log(const std::function<double(double)>& f, double lo, double hi,
                  double rel_tol, double f_tol, int max_iter) {
    if (!(lo > 0.0 && hi > lo))
        throw std::invalid_argument("bisect_log: need 0 < lo < hi");
    double llo = std::log(lo);
    double lhi = std::log(hi);
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument("bisect_log: no sign change on the bracket");
    for (int i = 0; i < max_iter; ++i) {
        double lmid = 0.5 * (llo + lhi);
        double mid = std::exp(lmid);
        double fm = f(mid);
        if (fm == 0.0 || (f_tol > 0.0 && std::fabs(fm) <= f_tol)) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            llo = lmid;
            flo = fm;
        } else {
            lhi = lmid;
        }
        if (lhi - llo <= rel_tol) break;
    }
    return std::exp(0.5 * (llo + lhi));
}

} // namespace regopt
