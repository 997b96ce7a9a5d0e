#include "regopt/hedging.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "regopt/normal.hpp"
#include "parallel.hpp"

namespace regopt {

namespace {

constexpr double kArgClamp = 38.0;

double clamped_cdf(double x) {
    if (x >= kArgClamp) return 1.0;
    if (x <= -kArgClamp) return 0.0;
    return normal_cdf(x);
}

double clamped_pdf(double x) {
    if (std::fabs(x) >= kArgClamp) return 0.0;
    return normal_pdf(x);
}

// Value and xi_t-derivative of the conditional expectation of one profile
// region: E[(xi_T/xi_t)^? branch(xi_T) 1_{lo <= xi_T < hi} | xi_t].
struct RegionTerm {
    double value = 0.0;
    double dvalue = 0.0;
};

// Tail moment M_p = E[Y^p 1_{lo/xi < Y < hi/xi}] for Y ~ law, together with
// its derivative in xi (boundaries move with 1/xi).
RegionTerm tail_moment(const LognormalLaw& law, double p, double lo, double hi,
                       double xi) {
    auto j = [&](double x) {
        if (x <= 0.0) return -kArgClamp;
        if (std::isinf(x)) return kArgClamp;
        return (std::log(x) - law.m - p * law.s * law.s) / law.s;
    };
    const double scale = std::exp(p * law.m + 0.5 * p * p * law.s * law.s);
    const double jb = j(hi / xi);
    const double ja = j(lo / xi);
    RegionTerm t;
    t.value = scale * (clamped_cdf(jb) - clamped_cdf(ja));
    t.dvalue = -scale / (law.s * xi) * (clamped_pdf(jb) - clamped_pdf(ja));
    return t;
}

struct WealthAndDelta {
    double wealth = 0.0;
    double delta = 0.0; // dX_t / dxi_t
};

WealthAndDelta evaluate_pre_horizon(const WealthProfile& profile,
                                    const MarketParams& mkt, double t,
                                    double xi_t) {
    if (!(xi_t > 0.0))
        throw std::domain_error("wealth_pre_horizon: xi_t must be > 0");
    const LognormalLaw law = remaining_density_law(mkt, t);
    const double g = profile.gamma();
    const double p = 1.0 - 1.0 / g;
    WealthAndDelta out;
    for (const Region& rg : profile.regions()) {
        if (std::holds_alternative<ZeroBranch>(rg.branch)) continue;
        if (const auto* c = std::get_if<ConstantBranch>(&rg.branch)) {
            const RegionTerm m1 = tail_moment(law, 1.0, rg.lo, rg.hi, xi_t);
            out.wealth += c->level * m1.value;
            out.delta += c->level * m1.dvalue;
            continue;
        }
        const auto& pw = std::get<PowerBranch>(rg.branch);
        const double head = std::pow(pw.lambda_eff * xi_t, -1.0 / g);
        const RegionTerm mp = tail_moment(law, p, rg.lo, rg.hi, xi_t);
        const RegionTerm m1 = tail_moment(law, 1.0, rg.lo, rg.hi, xi_t);
        out.wealth += head * mp.value + pw.shift * m1.value;
        out.delta += head * (mp.dvalue - mp.value / (g * xi_t)) + pw.shift * m1.dvalue;
    }
    return out;
}

} // namespace

double wealth_pre_horizon(const Solution& sol, const MarketParams& mkt,
                          const CrraUtility& u, double t, double xi_t) {
    (void)u;
    return evaluate_pre_horizon(sol.profile, mkt, t, xi_t).wealth;
}

double risky_exposure(const Solution& sol, const MarketParams& mkt,
                      const CrraUtility& u, double t, double xi_t) {
    (void)u;
    const WealthAndDelta wd = evaluate_pre_horizon(sol.profile, mkt, t, xi_t);
    return -mkt.theta() * xi_t * wd.delta;
}

double strategy_pre_horizon(const Solution& sol, const MarketParams& mkt,
                            const CrraUtility& u, double t, double xi_t) {
    (void)u;
    const WealthAndDelta wd = evaluate_pre_horizon(sol.profile, mkt, t, xi_t);
    if (wd.wealth <= 0.0) return kInfinity; // fraction diverges at zero wealth
    return -mkt.theta() * xi_t * wd.delta / (mkt.sigma * wd.wealth);
}

double relative_risk_exposure(const Solution& constrained,
                              const Solution& benchmark, const MarketParams& mkt,
                              const CrraUtility& u, double t, double xi_t) {
    const double pi_b = strategy_pre_horizon(benchmark, mkt, u, t, xi_t);
    if (pi_b == 0.0)
        throw std::domain_error("relative_risk_exposure: benchmark fraction is zero");
    return strategy_pre_horizon(constrained, mkt, u, t, xi_t) / pi_b;
}

ReplicationReport simulate_replication(const Solution& sol,
                                       const MarketParams& mkt,
                                       const CrraUtility& u,
                                       std::int64_t n_paths,
                                       std::int64_t n_steps,
                                       std::uint64_t seed) {
    if (n_paths < 1 || n_steps < 1)
        throw std::invalid_argument("simulate_replication: need n_paths, n_steps >= 1");
    const double th = mkt.theta();
    const double dt = mkt.T / static_cast<double>(n_steps);
    const double sqdt = std::sqrt(dt);
    const double x0 = sol.diagnostics.budget;
    const std::vector<double> bounds = sol.profile.boundaries();

    std::vector<double> sq_err(n_paths, 0.0);
    std::vector<double> terminal_claim(n_paths, 0.0);
    std::vector<std::uint8_t> near_boundary(n_paths, 0);

    detail::parallel_chunks(n_paths, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) {
            std::mt19937_64 rng(detail::splitmix64(seed ^ (0x42ull + static_cast<std::uint64_t>(i))));
            double xi = 1.0;
            double x = x0;
            for (std::int64_t k = 0; k < n_steps; ++k) {
                const double t = static_cast<double>(k) * dt;
                const double exposure = risky_exposure(sol, mkt, u, t, xi);
                const double uu = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
                const double z = normal_quantile(uu);
                x += mkt.r * x * dt + exposure * (th * dt + sqdt * z);
                xi *= std::exp(-(mkt.r + 0.5 * th * th) * dt - th * sqdt * z);
            }
            const double target = sol.profile.evaluate(xi);
            sq_err[i] = (x - target) * (x - target);
            terminal_claim[i] = xi * x;
            for (double b : bounds)
                if (std::fabs(xi - b) <= 1e-3 * b) near_boundary[i] = 1;
        }
    });

    double sum_sq = 0.0;
    double sum_claim = 0.0;
    double sum_claim_sq = 0.0;
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < n_paths; ++i) {
        sum_sq += sq_err[i];
        sum_claim += terminal_claim[i];
        sum_claim_sq += terminal_claim[i] * terminal_claim[i];
        hits += near_boundary[i];
    }
    ReplicationReport rep;
    const auto n = static_cast<double>(n_paths);
    rep.rmse = std::sqrt(sum_sq / n);
    rep.mean_abs_budget_drift = std::fabs(sum_claim / n - x0) / x0;
    const double claim_var = std::max(sum_claim_sq / n - (sum_claim / n) * (sum_claim / n), 0.0);
    rep.budget_se = std::sqrt(claim_var / n) / x0;
    rep.n_paths = n_paths;
    rep.n_steps = n_steps;
    rep.boundary_hits = hits;
    return rep;
}

} // namespace regopt
