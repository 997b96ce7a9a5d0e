#include "regopt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "regopt/normal.hpp"
#include "parallel.hpp"

namespace regopt {

namespace {

struct Pick {
    double x = 0.0;
    double val = -kInfinity;
};

void consider(Pick& best, double x, double val, bool prefer_high) {
    if (val > best.val || (prefer_high && val == best.val && x > best.x)) {
        best.x = x;
        best.val = val;
    }
}

// Shared scan state for the pointwise Lagrangian maximization.
struct Lagrangian {
    const std::vector<double>& grid; // sorted wealth levels, grid[0] == 0
    std::vector<double> util;        // U((x - DT)^+) per level
    std::size_t idx_L;               // first level >= L (grid.size() if none)
    double L;
    double DT;
    double gamma;

    Lagrangian(const OracleInstance& inst, double L_)
        : grid(inst.wealth_grid), idx_L(0), L(L_), DT(inst.DT), gamma(inst.gamma) {
        util.resize(grid.size());
        const double one_m_g = 1.0 - gamma;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double surplus = grid[k] - DT;
            util[k] = surplus > 0.0 ? std::pow(surplus, one_m_g) / one_m_g : 0.0;
        }
        idx_L = std::lower_bound(grid.begin(), grid.end(), L) - grid.begin();
    }

    double value_of(double x) const {
        const double surplus = x - DT;
        return surplus > 0.0 ? std::pow(surplus, 1.0 - gamma) / (1.0 - gamma) : 0.0;
    }

    double foc_candidate(double lam_xi) const {
        return std::pow(lam_xi, -1.0 / gamma) + DT;
    }

    // max over x < L of util - (a-b) x - b L; a = lambda xi_i, b = lambda2 xi_i.
    // The (a-b) form keeps the flat case a == b exactly flat in floating point.
    // from_k = 1 restricts the scan to positive levels.
    Pick best_below(double a, double b, bool prefer_high, std::size_t from_k = 0) const {
        Pick best;
        const double slope = a - b;
        for (std::size_t k = from_k; k < idx_L; ++k)
            consider(best, grid[k], util[k] - slope * grid[k] - b * L, prefer_high);
        const double xc = foc_candidate(slope > 0.0 ? slope : a);
        if (slope > 0.0 && xc < L && xc > DT)
            consider(best, xc, value_of(xc) - slope * xc - b * L, prefer_high);
        return best;
    }

    // max over x < cap of the penalized objective: the loss-heavier
    // alternative branch of a state currently allocated at cap.
    Pick best_below_capped(double a, double b, double cap) const {
        Pick best;
        const double slope = a - b;
        for (std::size_t k = 0; k < idx_L && grid[k] < cap; ++k)
            consider(best, grid[k], util[k] - slope * grid[k] - b * L, false);
        const double xc = foc_candidate(slope > 0.0 ? slope : a);
        if (slope > 0.0 && xc < cap && xc < L && xc > DT)
            consider(best, xc, value_of(xc) - slope * xc - b * L, false);
        return best;
    }

    // max over x >= L of util - a x (no penalty above the threshold).
    Pick best_above(double a, bool prefer_high) const {
        Pick best;
        for (std::size_t k = idx_L; k < grid.size(); ++k)
            consider(best, grid[k], util[k] - a * grid[k], prefer_high);
        const double xc = foc_candidate(a);
        if (xc >= L && xc > DT) consider(best, xc, value_of(xc) - a * xc, prefer_high);
        return best;
    }

    // Per-state maximum over all levels (benchmark case; L plays no role).
    Pick best_free(double a, std::size_t from_k = 0) const {
        Pick best;
        for (std::size_t k = from_k; k < grid.size(); ++k)
            consider(best, grid[k], util[k] - a * grid[k], false);
        const double xc = foc_candidate(a);
        if (xc > DT) consider(best, xc, value_of(xc) - a * xc, false);
        return best;
    }
};

double split_term(const OracleInstance& inst, const std::vector<double>& x,
                  const std::vector<SplitShare>& splits,
                  double (*f)(const Atom&, double)) {
    double total = 0.0;
    for (const SplitShare& sp : splits) {
        if (sp.atom < 0) continue;
        const Atom& at = inst.atoms[static_cast<std::size_t>(sp.atom)];
        total += sp.w * (f(at, sp.x) - f(at, x[static_cast<std::size_t>(sp.atom)]));
    }
    return total;
}

double allocation_budget(const OracleInstance& inst, const std::vector<double>& x,
                         const std::vector<SplitShare>& splits = {}) {
    double b = 0.0;
    for (std::size_t i = 0; i < inst.atoms.size(); ++i)
        b += inst.atoms[i].p * inst.atoms[i].xi * x[i];
    return b + split_term(inst, x, splits,
                          [](const Atom& at, double v) { return at.p * at.xi * v; });
}

double allocation_utility(const OracleInstance& inst, const Lagrangian& lag,
                          const std::vector<double>& x,
                          const std::vector<SplitShare>& splits = {}) {
    double v = 0.0;
    for (std::size_t i = 0; i < inst.atoms.size(); ++i)
        v += inst.atoms[i].p * lag.value_of(x[i]);
    for (const SplitShare& sp : splits) {
        if (sp.atom < 0) continue;
        const Atom& at = inst.atoms[static_cast<std::size_t>(sp.atom)];
        v += at.p * sp.w *
             (lag.value_of(sp.x) - lag.value_of(x[static_cast<std::size_t>(sp.atom)]));
    }
    return v;
}

double loss_below(double L, double v) { return v < L ? L - v : 0.0; }

double allocation_shortfall(const OracleInstance& inst, double L,
                            const std::vector<double>& x,
                            const std::vector<SplitShare>& splits = {}) {
    double s = 0.0;
    for (std::size_t i = 0; i < inst.atoms.size(); ++i)
        s += inst.atoms[i].p * inst.atoms[i].xi * loss_below(L, x[i]);
    for (const SplitShare& sp : splits) {
        if (sp.atom < 0) continue;
        const Atom& at = inst.atoms[static_cast<std::size_t>(sp.atom)];
        s += at.p * at.xi * sp.w *
             (loss_below(L, sp.x) -
              loss_below(L, x[static_cast<std::size_t>(sp.atom)]));
    }
    return s;
}

double allocation_prob_below(const OracleInstance& inst, double L,
                             const std::vector<double>& x,
                             const std::vector<SplitShare>& splits = {}) {
    double s = 0.0;
    for (std::size_t i = 0; i < inst.atoms.size(); ++i)
        if (x[i] < L) s += inst.atoms[i].p;
    for (const SplitShare& sp : splits) {
        if (sp.atom < 0) continue;
        const Atom& at = inst.atoms[static_cast<std::size_t>(sp.atom)];
        const double cur = x[static_cast<std::size_t>(sp.atom)] < L ? 1.0 : 0.0;
        const double alt = sp.x < L ? 1.0 : 0.0;
        s += at.p * sp.w * (alt - cur);
    }
    return s;
}

// Multiplier search bracket shared by all constraint kinds.
constexpr double kLamLo = 1e-12;
constexpr double kLamHi = 1e12;
constexpr double kTie = 1e-9;

// Binds the budget exactly by splitting a Lagrangian-indifferent stratum
// between zero and its live branch. The budget of a pointwise-argmax
// allocation is a step function of lambda when states drop to zero wealth,
// so after the bisection the residual is assigned to the marginal stratum.
template <typename AltPick>
void bind_budget(const OracleInstance& inst, std::vector<double>& alloc,
                 std::vector<SplitShare>& splits, double x0, const AltPick& alt_pick) {
    double gap = x0 - allocation_budget(inst, alloc, splits);
    if (gap <= 1e-11 * x0) return;
    const std::size_t n = inst.atoms.size();
    for (std::size_t i = 0; i < n && gap > 1e-11 * x0; ++i) {
        const Pick alt = alt_pick(i);
        if (!(alt.x > alloc[i])) continue;
        const double lift = inst.atoms[i].p * inst.atoms[i].xi * (alt.x - alloc[i]);
        if (lift <= 0.0) continue;
        if (lift <= gap) {
            alloc[i] = alt.x;
            gap -= lift;
        } else {
            splits.push_back(SplitShare{static_cast<std::int64_t>(i), alt.x, gap / lift});
            gap = 0.0;
        }
    }
}

OracleSolution solve_unconstrained(const OracleInstance& inst) {
    const Lagrangian lag(inst, kInfinity);
    const std::size_t n = inst.atoms.size();
    std::vector<double> alloc(n, 0.0);
    auto build = [&](double lam, std::vector<double>& out) {
        detail::parallel_chunks(static_cast<std::int64_t>(n),
                                [&](std::int64_t lo, std::int64_t hi) {
                                    for (std::int64_t i = lo; i < hi; ++i)
                                        out[i] = lag.best_free(lam * inst.atoms[i].xi).x;
                                });
    };
    double llo = std::log(kLamLo), lhi = std::log(kLamHi);
    std::vector<double> work(n);
    for (int it = 0; it < 120; ++it) {
        const double lmid = 0.5 * (llo + lhi);
        build(std::exp(lmid), work);
        const double gap = allocation_budget(inst, work) - inst.x0;
        if (std::fabs(gap) <= 1e-11 * inst.x0) { llo = lhi = lmid; break; }
        if (gap > 0.0) llo = lmid; else lhi = lmid;
        if (lhi - llo < 5e-15) break;
    }
    const double lam = std::exp(lhi); // feasible side: budget <= x0
    build(lam, alloc);

    std::vector<SplitShare> splits;
    bind_budget(inst, alloc, splits, inst.x0, [&](std::size_t i) {
        if (alloc[i] != 0.0) return Pick{};
        const double a = lam * inst.atoms[i].xi;
        const Pick live = lag.best_free(a, 1);
        return live.val >= -kTie * (1.0 + std::fabs(live.val)) ? live : Pick{};
    });

    OracleSolution sol;
    sol.allocation = std::move(alloc);
    sol.splits = std::move(splits);
    sol.lambda_budget = lam;
    sol.expected_utility = allocation_utility(inst, lag, sol.allocation, sol.splits);
    sol.budget = allocation_budget(inst, sol.allocation, sol.splits);
    double dual = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        dual += inst.atoms[i].p * lag.best_free(lam * inst.atoms[i].xi).val;
    sol.dual_bound = dual + lam * inst.x0;
    return sol;
}

OracleSolution solve_var(const OracleInstance& inst, const VarConstraint& c) {
    const std::size_t n = inst.atoms.size();
    const Lagrangian lag(inst, c.L);
    const double mass_budget = c.alpha * static_cast<double>(n); // in atoms
    const auto k_full = static_cast<std::int64_t>(std::floor(mass_budget + 1e-9));
    const double frac = std::max(mass_budget - static_cast<double>(k_full), 0.0);

    // Discrete feasibility: insure everything but the alpha mass of the
    // dearest states (the marginal state insures its remaining fraction).
    {
        double cheapest = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double rank = static_cast<double>(n - 1 - i); // 0 = dearest
            double keep = 1.0;
            if (rank < static_cast<double>(k_full)) keep = 0.0;
            else if (rank < mass_budget) keep = 1.0 - frac;
            cheapest += keep * inst.atoms[i].p * inst.atoms[i].xi * c.L;
        }
        if (inst.x0 < cheapest * (1.0 - 1e-12)) throw InfeasibleError(inst.x0, cheapest);
    }

    std::vector<Pick> above(n), below(n);
    std::vector<std::int64_t> order(n);
    double lambda2 = 0.0;
    std::vector<SplitShare> splits;
    auto build = [&](double lam, std::vector<double>& out) {
        detail::parallel_chunks(static_cast<std::int64_t>(n),
                                [&](std::int64_t lo, std::int64_t hi) {
                                    for (std::int64_t i = lo; i < hi; ++i) {
                                        const double a = lam * inst.atoms[i].xi;
                                        above[i] = lag.best_above(a, false);
                                        below[i] = lag.best_below(a, 0.0, false);
                                    }
                                });
        // Cap the probability mass below L at alpha, dropping the smallest
        // default benefits first; the marginal state keeps its fractional
        // share below L.
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::int64_t i, std::int64_t j) {
            return below[i].val - above[i].val > below[j].val - above[j].val;
        });
        std::int64_t defaults = 0;
        lambda2 = 0.0;
        splits.clear();
        for (std::int64_t r = 0; r < static_cast<std::int64_t>(n); ++r) {
            const std::int64_t i = order[r];
            const double benefit = below[i].val - above[i].val;
            if (benefit > 0.0 && defaults < k_full) {
                out[i] = below[i].x;
                ++defaults;
            } else {
                out[i] = above[i].x;
                if (benefit > 0.0 && defaults == k_full && splits.empty() &&
                    frac > 0.0) {
                    splits.push_back(SplitShare{i, below[i].x, frac});
                }
                if (benefit > lambda2) lambda2 = benefit; // marginal forced state
            }
        }
    };

    std::vector<double> work(n), alloc(n);
    double llo = std::log(kLamLo), lhi = std::log(kLamHi);
    for (int it = 0; it < 120; ++it) {
        const double lmid = 0.5 * (llo + lhi);
        build(std::exp(lmid), work);
        const double gap = allocation_budget(inst, work, splits) - inst.x0;
        if (std::fabs(gap) <= 1e-11 * inst.x0) { llo = lhi = lmid; break; }
        if (gap > 0.0) llo = lmid; else lhi = lmid;
        if (lhi - llo < 5e-15) break;
    }
    const double lam = std::exp(lhi);
    build(lam, alloc);

    // Budget margin. Two step sources: a zero state at its live/default tie
    // (only when the probability cap is slack), and the insured level at its
    // tie with the interior optimum (shortfall- and probability-neutral).
    bind_budget(inst, alloc, splits, inst.x0, [&](std::size_t i) {
        for (const SplitShare& sp : splits)
            if (sp.atom == static_cast<std::int64_t>(i)) return Pick{};
        const double a = lam * inst.atoms[i].xi;
        if (alloc[i] == 0.0 && lambda2 == 0.0) {
            const Pick low = lag.best_below(a, 0.0, false, 1);
            const Pick high = above[i];
            const double cur = below[i].val;
            Pick alt;
            if (low.val >= cur - kTie * (1.0 + std::fabs(cur))) alt = low;
            if (high.val >= cur - kTie * (1.0 + std::fabs(cur)) && high.val > alt.val)
                alt = high;
            return alt;
        }
        if (alloc[i] == c.L) {
            const double xc = lag.foc_candidate(a);
            if (xc <= c.L) return Pick{};
            const Pick alt{xc, lag.value_of(xc) - a * xc};
            const double cur = lag.value_of(c.L) - a * c.L;
            if (alt.val >= cur - kTie * (1.0 + std::fabs(cur))) return alt;
        }
        return Pick{};
    });

    OracleSolution sol;
    sol.allocation = std::move(alloc);
    sol.splits = std::move(splits);
    sol.lambda_budget = lam;
    sol.lambda_risk = lambda2;
    sol.expected_utility = allocation_utility(inst, lag, sol.allocation, sol.splits);
    sol.budget = allocation_budget(inst, sol.allocation, sol.splits);
    sol.shortfall = allocation_shortfall(inst, c.L, sol.allocation, sol.splits);
    sol.prob_below = allocation_prob_below(inst, c.L, sol.allocation, sol.splits);
    double dual = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        dual += inst.atoms[i].p * std::max(above[i].val, below[i].val - lambda2);
    sol.dual_bound = dual + lam * inst.x0 + lambda2 * c.alpha;
    return sol;
}

OracleSolution solve_es(const OracleInstance& inst, const EsConstraint& c) {
    const std::size_t n = inst.atoms.size();
    const Lagrangian lag(inst, c.L);

    {
        double exi = 0.0;
        for (const Atom& at : inst.atoms) exi += at.p * at.xi;
        const double x0_min = std::max(c.L * exi - c.epsilon, 0.0);
        if (inst.x0 < x0_min * (1.0 - 1e-12)) throw InfeasibleError(inst.x0, x0_min);
    }

    // Allocation at fixed multipliers; ties inside the flat segment prefer the
    // insured side so the inner root search brackets.
    auto fill = [&](double lam, double lam2, std::vector<double>& out) {
        detail::parallel_chunks(static_cast<std::int64_t>(n),
                                [&](std::int64_t lo, std::int64_t hi) {
                                    for (std::int64_t i = lo; i < hi; ++i) {
                                        const double a = lam * inst.atoms[i].xi;
                                        const double b = lam2 * inst.atoms[i].xi;
                                        const Pick hi_pick = lag.best_above(a, true);
                                        const Pick lo_pick = lag.best_below(a, b, true);
                                        out[i] = lo_pick.val > hi_pick.val ? lo_pick.x
                                                                           : hi_pick.x;
                                    }
                                });
    };

    // Uses the remaining shortfall budget by moving Lagrangian-tied states
    // toward their loss-heavier tied branch, splitting the last stratum so
    // the constraint binds exactly.
    auto bind_shortfall = [&](double lam, double lam2, std::vector<double>& out,
                              std::vector<SplitShare>& splits) {
        splits.clear();
        double slack = c.epsilon - allocation_shortfall(inst, c.L, out);
        if (slack <= 0.0) return;
        for (std::size_t r = n; r-- > 0;) {
            if (slack <= 0.0) break;
            const std::size_t i = r; // atoms sorted by xi: walk from the top
            const double a = lam * inst.atoms[i].xi;
            const double b = lam2 * inst.atoms[i].xi;
            const Pick lo_pick = out[i] >= c.L
                                     ? lag.best_below(a, b, false)
                                     : lag.best_below_capped(a, b, out[i]);
            if (lo_pick.val == -kInfinity) continue;
            const double penalty = out[i] < c.L ? b * (c.L - out[i]) : 0.0;
            const double cur = lag.value_of(out[i]) - a * out[i] - penalty;
            if (cur - lo_pick.val > kTie * (1.0 + std::fabs(cur))) continue;
            const double extra_loss = loss_below(c.L, lo_pick.x) - loss_below(c.L, out[i]);
            if (extra_loss <= 0.0) continue;
            const double full_cost = inst.atoms[i].p * inst.atoms[i].xi * extra_loss;
            if (full_cost <= slack) {
                out[i] = lo_pick.x;
                slack -= full_cost;
            } else {
                splits.push_back(SplitShare{static_cast<std::int64_t>(i), lo_pick.x,
                                            slack / full_cost});
                slack = 0.0;
            }
        }
    };

    std::vector<double> work(n), alloc(n);
    double inner_lambda2 = 0.0;
    std::vector<SplitShare> splits;
    auto build = [&](double lam, std::vector<double>& out,
                     std::vector<SplitShare>& sp) {
        fill(lam, 0.0, out);
        if (allocation_shortfall(inst, c.L, out) <= c.epsilon) {
            inner_lambda2 = 0.0; // slack: nothing requires the shortfall to bind
            sp.clear();
            return;
        }
        double lo = 0.0, hi = lam;
        for (int it = 0; it < 90; ++it) {
            const double mid = 0.5 * (lo + hi);
            fill(lam, mid, out);
            const double gap = allocation_shortfall(inst, c.L, out) - c.epsilon;
            if (gap > 0.0) lo = mid; else hi = mid;
            if (hi - lo <= 1e-15 * lam) break;
        }
        inner_lambda2 = hi; // feasible side
        fill(lam, inner_lambda2, out);
        bind_shortfall(lam, inner_lambda2, out, sp);
    };

    double llo = std::log(kLamLo), lhi = std::log(kLamHi);
    for (int it = 0; it < 120; ++it) {
        const double lmid = 0.5 * (llo + lhi);
        std::vector<SplitShare> sp;
        build(std::exp(lmid), work, sp);
        const double gap = allocation_budget(inst, work, sp) - inst.x0;
        if (std::fabs(gap) <= 1e-11 * inst.x0) { llo = lhi = lmid; break; }
        if (gap > 0.0) llo = lmid; else lhi = lmid;
        if (lhi - llo < 5e-15) break;
    }
    const double lam = std::exp(lhi);
    build(lam, alloc, splits);

    // Residual budget margin. With a binding shortfall only the
    // shortfall-neutral tie of the insured level with the interior optimum
    // may move (a below-L flip would unbind the shortfall the inner pass just
    // pinned); with a slack constraint the live/default tie moves freely,
    // since lifting a zero state only reduces the shortfall.
    bind_budget(inst, alloc, splits, inst.x0, [&](std::size_t i) {
        for (const SplitShare& sp : splits)
            if (sp.atom == static_cast<std::int64_t>(i)) return Pick{};
        const double a = lam * inst.atoms[i].xi;
        if (inner_lambda2 == 0.0 && alloc[i] == 0.0) {
            const Pick live = lag.best_free(a, 1);
            if (live.val >= -kTie * (1.0 + std::fabs(live.val))) return live;
            return Pick{};
        }
        if (alloc[i] != c.L) return Pick{};
        const double xc = lag.foc_candidate(a);
        if (xc <= c.L) return Pick{};
        const Pick alt{xc, lag.value_of(xc) - a * xc};
        const double cur = lag.value_of(c.L) - a * c.L;
        if (alt.val >= cur - kTie * (1.0 + std::fabs(cur))) return alt;
        return Pick{};
    });

    OracleSolution sol;
    sol.allocation = std::move(alloc);
    sol.splits = std::move(splits);
    sol.lambda_budget = lam;
    sol.lambda_risk = inner_lambda2;
    sol.expected_utility = allocation_utility(inst, lag, sol.allocation, sol.splits);
    sol.budget = allocation_budget(inst, sol.allocation, sol.splits);
    sol.shortfall = allocation_shortfall(inst, c.L, sol.allocation, sol.splits);
    sol.prob_below = allocation_prob_below(inst, c.L, sol.allocation, sol.splits);
    double dual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = lam * inst.atoms[i].xi;
        const double b = inner_lambda2 * inst.atoms[i].xi;
        dual += inst.atoms[i].p *
                std::max(lag.best_above(a, false).val, lag.best_below(a, b, false).val);
    }
    sol.dual_bound = dual + lam * inst.x0 + inner_lambda2 * c.epsilon;
    return sol;
}

} // namespace

std::vector<Atom> discretize(const LognormalLaw& law, std::int64_t n_states) {
    if (n_states < 2) throw std::invalid_argument("discretize: need n_states >= 2");
    const auto n = static_cast<std::size_t>(n_states);
    std::vector<double> edges(n + 1);
    edges[0] = 0.0;
    edges[n] = kInfinity;
    for (std::size_t i = 1; i < n; ++i)
        edges[i] = std::exp(law.m + law.s * normal_quantile(static_cast<double>(i) /
                                                            static_cast<double>(n)));
    std::vector<Atom> atoms(n);
    const double p = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        atoms[i].p = p;
        atoms[i].xi = truncated_mean(law, 1.0, edges[i], edges[i + 1]) / p;
    }
    return atoms;
}

OracleInstance make_instance(const MarketParams& mkt, const Institution& inst,
                             const CrraUtility& u, const RiskConstraint& constraint,
                             std::int64_t n_states, std::int64_t n_grid) {
    OracleInstance oi;
    oi.atoms = discretize(terminal_density_law(mkt), n_states);
    oi.constraint = constraint;
    oi.x0 = inst.x0;
    oi.DT = inst.DT;
    oi.gamma = u.gamma;

    double L = -1.0;
    if (const auto* v = std::get_if<VarConstraint>(&constraint)) L = v->L;
    if (const auto* e = std::get_if<EsConstraint>(&constraint)) L = e->L;

    const double top = 20.0 * inst.x0 * std::exp(mkt.r * mkt.T);
    const double bottom = 1e-4 * inst.x0;
    std::vector<double>& grid = oi.wealth_grid;
    grid.reserve(static_cast<std::size_t>(n_grid) + 4);
    grid.push_back(0.0);
    const auto levels = static_cast<std::size_t>(n_grid);
    for (std::size_t k = 0; k < levels; ++k)
        grid.push_back(bottom * std::pow(top / bottom,
                                         static_cast<double>(k) /
                                             static_cast<double>(levels - 1)));
    if (L > 0.0) grid.push_back(L);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return oi;
}

OracleSolution oracle_solve(const OracleInstance& inst) {
    if (inst.atoms.empty()) throw std::invalid_argument("oracle_solve: no atoms");
    double psum = 0.0;
    for (const Atom& a : inst.atoms) psum += a.p;
    if (std::fabs(psum - 1.0) > 1e-9)
        throw std::invalid_argument("oracle_solve: atom probabilities must sum to 1");
    if (!std::is_sorted(inst.atoms.begin(), inst.atoms.end(),
                        [](const Atom& a, const Atom& b) { return a.xi < b.xi; }))
        throw std::invalid_argument("oracle_solve: atoms must be sorted by xi");

    if (const auto* v = std::get_if<VarConstraint>(&inst.constraint)) {
        if (v->L <= 0.0 || v->alpha >= 1.0) return solve_unconstrained(inst);
        return solve_var(inst, *v);
    }
    if (const auto* e = std::get_if<EsConstraint>(&inst.constraint)) {
        if (e->L <= 0.0) return solve_unconstrained(inst);
        return solve_es(inst, *e);
    }
    return solve_unconstrained(inst);
}

CrosscheckReport crosscheck(const Solution& sol, const OracleInstance& inst,
                            double utility_tol, double profile_tol) {
    const OracleSolution ocr = oracle_solve(inst);
    const std::size_t n = inst.atoms.size();

    CrosscheckReport rep;
    const double eu_closed = sol.diagnostics.expected_utility;
    rep.utility_gap = std::fabs(eu_closed - ocr.expected_utility) /
                      std::max(std::fabs(eu_closed), 1e-300);

    const std::vector<double> bounds = sol.profile.boundaries();
    auto straddles = [&](std::size_t i) {
        for (const SplitShare& sp : ocr.splits)
            if (sp.atom == static_cast<std::int64_t>(i)) return true;
        const double lo = i == 0 ? 0.0 : inst.atoms[i - 1].xi;
        const double hi = i + 1 < n ? inst.atoms[i + 1].xi : kInfinity;
        for (double b : bounds)
            if (b > lo && b < hi) return true;
        return false;
    };

    double L = -1.0;
    if (const auto* v = std::get_if<VarConstraint>(&inst.constraint)) L = v->L;
    if (const auto* e = std::get_if<EsConstraint>(&inst.constraint)) L = e->L;

    double sup = 0.0;
    std::int64_t skipped = 0;
    std::int64_t bands = 0;
    int prev_kind = -1;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = ocr.allocation[i];
        int kind = 2; // power-like
        if (x == 0.0) kind = 0;
        else if (L > 0.0 && std::fabs(x - L) <= 1e-9 * (1.0 + L)) kind = 1;
        if (kind != prev_kind) { ++bands; prev_kind = kind; }
        if (straddles(i)) { ++skipped; continue; }
        sup = std::max(sup, std::fabs(sol.profile.evaluate(inst.atoms[i].xi) - x));
    }
    rep.profile_sup_gap = sup / inst.x0;
    rep.boundary_atoms = skipped;
    rep.bands = bands;
    rep.pass = rep.utility_gap <= utility_tol && rep.profile_sup_gap <= profile_tol;

    std::ostringstream os;
    os << "utility_gap=" << rep.utility_gap << " profile_sup_gap=" << rep.profile_sup_gap
       << " boundary_atoms=" << rep.boundary_atoms << " bands=" << rep.bands
       << " oracle_eu=" << ocr.expected_utility << " closed_eu=" << eu_closed;
    rep.detail = os.str();
    return rep;
}

} // namespace regopt
