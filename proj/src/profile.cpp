#include "regopt/profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace regopt {

namespace {

double branch_value(const Branch& br, double xi, double gamma) {
    if (std::holds_alternative<ZeroBranch>(br)) return 0.0;
    if (const auto* c = std::get_if<ConstantBranch>(&br)) return c->level;
    const auto& p = std::get<PowerBranch>(br);
    return std::pow(p.lambda_eff * xi, -1.0 / gamma) + p.shift;
}

// State level where a power branch crosses L from above; +inf if never.
double power_crossing(const PowerBranch& p, double gamma, double L) {
    if (L <= p.shift) return kInfinity;
    return std::pow(L - p.shift, -gamma) / p.lambda_eff;
}

} // namespace

WealthProfile::WealthProfile(double gamma, std::vector<Region> regions)
    : gamma_(gamma), regions_(std::move(regions)) {
    if (!(gamma_ > 0.0 && gamma_ < 1.0))
        throw std::invalid_argument("WealthProfile: gamma must lie in (0,1)");
    if (regions_.empty()) throw std::invalid_argument("WealthProfile: no regions");
    if (regions_.front().lo != 0.0)
        throw std::invalid_argument("WealthProfile: first region must start at 0");
    if (!std::isinf(regions_.back().hi))
        throw std::invalid_argument("WealthProfile: last region must extend to +inf");
    for (std::size_t i = 0; i < regions_.size(); ++i) {
        const Region& rg = regions_[i];
        if (!(rg.lo < rg.hi))
            throw std::invalid_argument("WealthProfile: empty or inverted region");
        if (i + 1 < regions_.size() && regions_[i + 1].lo != rg.hi)
            throw std::invalid_argument("WealthProfile: regions must be contiguous");
        if (const auto* p = std::get_if<PowerBranch>(&rg.branch)) {
            if (!(p->lambda_eff > 0.0) || p->shift < 0.0)
                throw std::invalid_argument("WealthProfile: invalid power branch");
        } else if (const auto* c = std::get_if<ConstantBranch>(&rg.branch)) {
            if (c->level < 0.0)
                throw std::invalid_argument("WealthProfile: negative constant branch");
        }
    }
    // Economic monotonicity: wealth cannot increase across a boundary.
    for (std::size_t i = 0; i + 1 < regions_.size(); ++i) {
        const double b = regions_[i].hi;
        const double left = branch_value(regions_[i].branch, b, gamma_);
        const double right = branch_value(regions_[i + 1].branch, b, gamma_);
        if (right > left * (1.0 + 1e-9) + 1e-9)
            throw std::invalid_argument("WealthProfile: wealth increases across a boundary");
    }
}

double WealthProfile::evaluate(double xi) const {
    if (!(xi >= 0.0)) throw std::domain_error("WealthProfile::evaluate: xi must be >= 0");
    // Regions are [lo, hi); find the one containing xi.
    auto it = std::upper_bound(regions_.begin(), regions_.end(), xi,
                               [](double v, const Region& r) { return v < r.hi; });
    if (it == regions_.end()) --it;
    return branch_value(it->branch, xi, gamma_);
}

std::vector<double> WealthProfile::boundaries() const {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < regions_.size(); ++i) out.push_back(regions_[i].hi);
    return out;
}

double budget(const WealthProfile& profile, const LognormalLaw& law) {
    double total = 0.0;
    const double inv_g = 1.0 / profile.gamma();
    for (const Region& rg : profile.regions()) {
        if (const auto* p = std::get_if<PowerBranch>(&rg.branch)) {
            total += std::pow(p->lambda_eff, -inv_g) *
                         truncated_mean(law, 1.0 - inv_g, rg.lo, rg.hi) +
                     p->shift * truncated_mean(law, 1.0, rg.lo, rg.hi);
        } else if (const auto* c = std::get_if<ConstantBranch>(&rg.branch)) {
            total += c->level * truncated_mean(law, 1.0, rg.lo, rg.hi);
        }
    }
    return total;
}

double default_probability(const WealthProfile& profile, const LognormalLaw& law) {
    double prob = 0.0;
    for (const Region& rg : profile.regions()) {
        bool is_zero = std::holds_alternative<ZeroBranch>(rg.branch);
        if (const auto* c = std::get_if<ConstantBranch>(&rg.branch))
            is_zero = c->level == 0.0;
        if (is_zero) prob += truncated_mean(law, 0.0, rg.lo, rg.hi);
    }
    return prob;
}

double probability_below(const WealthProfile& profile, const LognormalLaw& law,
                         double L) {
    if (L <= 0.0) return 0.0;
    double prob = 0.0;
    const double gamma = profile.gamma();
    for (const Region& rg : profile.regions()) {
        if (std::holds_alternative<ZeroBranch>(rg.branch)) {
            prob += truncated_mean(law, 0.0, rg.lo, rg.hi);
        } else if (const auto* c = std::get_if<ConstantBranch>(&rg.branch)) {
            if (c->level < L) prob += truncated_mean(law, 0.0, rg.lo, rg.hi);
        } else {
            const auto& p = std::get<PowerBranch>(rg.branch);
            const double cross = power_crossing(p, gamma, L);
            const double a = std::max(rg.lo, cross);
            if (a < rg.hi) prob += truncated_mean(law, 0.0, a, rg.hi);
        }
    }
    return prob;
}

double expected_shortfall(const WealthProfile& profile, const LognormalLaw& law,
                          double L) {
    if (L <= 0.0) return 0.0;
    double total = 0.0;
    const double gamma = profile.gamma();
    const double inv_g = 1.0 / gamma;
    for (const Region& rg : profile.regions()) {
        if (std::holds_alternative<ZeroBranch>(rg.branch)) {
            total += L * truncated_mean(law, 1.0, rg.lo, rg.hi);
        } else if (const auto* c = std::get_if<ConstantBranch>(&rg.branch)) {
            if (c->level < L)
                total += (L - c->level) * truncated_mean(law, 1.0, rg.lo, rg.hi);
        } else {
            const auto& p = std::get<PowerBranch>(rg.branch);
            const double cross = power_crossing(p, gamma, L);
            const double a = std::max(rg.lo, cross);
            if (a < rg.hi) {
                total += (L - p.shift) * truncated_mean(law, 1.0, a, rg.hi) -
                         std::pow(p.lambda_eff, -inv_g) *
                             truncated_mean(law, 1.0 - inv_g, a, rg.hi);
            }
        }
    }
    return total;
}

double expected_utility(const WealthProfile& profile, const LognormalLaw& law,
                        const CrraUtility& u, double DT) {
    double total = 0.0;
    const double inv_g = 1.0 / u.gamma;
    for (const Region& rg : profile.regions()) {
        if (const auto* p = std::get_if<PowerBranch>(&rg.branch)) {
            if (std::fabs(p->shift - DT) > 1e-9 * (1.0 + DT))
                throw std::logic_error("expected_utility: power branch shift != DT");
            // U(I(lambda xi)) = (lambda xi)^{1-1/gamma} / (1-gamma)
            total += std::pow(p->lambda_eff, 1.0 - inv_g) / (1.0 - u.gamma) *
                     truncated_mean(law, 1.0 - inv_g, rg.lo, rg.hi);
        } else if (const auto* c = std::get_if<ConstantBranch>(&rg.branch)) {
            if (c->level > DT)
                total += u.value(c->level - DT) * truncated_mean(law, 0.0, rg.lo, rg.hi);
        }
    }
    return total;
}

} // namespace regopt
