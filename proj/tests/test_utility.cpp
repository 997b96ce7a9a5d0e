#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "regopt/roots.hpp"
#include "regopt/utility.hpp"
#include "support/test_support.hpp"

using namespace regopt;
using namespace regopt::testing;

TEST_CASE("crra basics") {
    CHECK_THROWS_AS(CrraUtility(1.0), std::invalid_argument);
    CHECK_THROWS_AS(CrraUtility(0.0), std::invalid_argument);
    const CrraUtility u(0.5);
    CHECK(u.value(0.0) == 0.0);
    CHECK(u.inverse_marginal(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(u.inverse_marginal(4.0) == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
    CHECK(u.inverse_marginal(1e12) <= 1e-12); // Inada: I(y) -> 0
    CHECK_THROWS_AS(u.inverse_marginal(0.0), std::domain_error);

    std::mt19937_64 rng(3);
    for (int it = 0; it < 100; ++it) {
        const CrraUtility uu(0.05 + 0.9 * uniform01(rng));
        const double y = std::exp(6.0 * (uniform01(rng) - 0.5));
        CHECK(uu.marginal(uu.inverse_marginal(y)) ==
              doctest::Approx(y).epsilon(1e-12));
    }
}

TEST_CASE("tangent point") {
    CHECK(tangent_point(CrraUtility(0.5), 100.0).hat_d == doctest::Approx(200.0));
    CHECK(tangent_point(CrraUtility(0.25), 75.0).hat_d == doctest::Approx(300.0));
    CHECK(tangent_point(CrraUtility(0.5), 0.0).degenerate());

    std::mt19937_64 rng(11);
    for (int it = 0; it < 50; ++it) {
        const CrraUtility u(0.1 + 0.8 * uniform01(rng));
        const double d = 1.0 + 200.0 * uniform01(rng);
        const TangentPoint tp = tangent_point(u, d);
        CHECK(tp.hat_d == doctest::Approx(tangent_point_generic(u, d)).epsilon(1e-10));
        // Tangency identity U(hat-d) = U'(hat-d) hat.
        const double lhs = u.value(tp.hat_d - d);
        const double rhs = u.marginal(tp.hat_d - d) * tp.hat_d;
        CHECK(std::fabs(lhs - rhs) <= 1e-10 * std::fabs(lhs));
    }
}

TEST_CASE("conjugate function") {
    const CrraUtility u(0.5);
    // Vanishes exactly at the tangent marginal.
    CHECK(conjugate(u, 100.0, 1.0, 0.1) == doctest::Approx(0.0).epsilon(1e-12));
    // d = 0: sup_x {2 sqrt(x) - x} = 1.
    CHECK(conjugate(u, 0.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-13));

    // Decreasing in y.
    double prev = kInfinity;
    for (double y = 0.01; y < 3.0; y += 0.05) {
        const double c = conjugate(u, 40.0, 0.7, y);
        CHECK(c < prev);
        prev = c;
    }
}

TEST_CASE("conjugate is the pointwise supremum") {
    std::mt19937_64 rng(17);
    for (int it = 0; it < 100; ++it) {
        const CrraUtility u(0.15 + 0.7 * uniform01(rng));
        const double d = 150.0 * uniform01(rng);
        const double lambda = std::exp(3.0 * (uniform01(rng) - 0.5));
        const double y = std::exp(3.0 * (uniform01(rng) - 0.5));
        const double c = conjugate(u, d, lambda, y);
        for (int k = 0; k < 1000; ++k) {
            const double x = d + 1e-9 + 500.0 * uniform01(rng);
            CHECK(c >= u.value(x - d) - x * lambda * y - 1e-9 * (1.0 + std::fabs(c)));
        }
        const double x_star = u.inverse_marginal(lambda * y) + d;
        const double at_star = u.value(x_star - d) - x_star * lambda * y;
        CHECK(std::fabs(c - at_star) <= 1e-9 * (1.0 + std::fabs(c)));
    }

    // c(U'(hat-d)/lambda) = 0 for random lambda.
    std::mt19937_64 rng2(23);
    for (int it = 0; it < 50; ++it) {
        const CrraUtility u(0.2 + 0.6 * uniform01(rng2));
        const double d = 5.0 + 100.0 * uniform01(rng2);
        const double lambda = std::exp(4.0 * (uniform01(rng2) - 0.5));
        const TangentPoint tp = tangent_point(u, d);
        const double y0 = u.marginal(tp.hat_d - d) / lambda;
        CHECK(std::fabs(conjugate(u, d, lambda, y0)) <= 1e-10);
    }
}

TEST_CASE("shifted conjugate zero") {
    const CrraUtility u(0.5);
    const double d = 100.0;
    const double lambda = 0.8;

    // lambda2 = 0 reduces to the zero of c(y).
    const TangentPoint tp = tangent_point(u, d);
    auto z0 = shifted_conjugate_zero(u, d, lambda, 0.0, 77.0);
    REQUIRE(z0.has_value());
    CHECK(*z0 == doctest::Approx(u.marginal(tp.hat_d - d) / lambda).epsilon(1e-13));

    // lambda2 = lambda, l < d: zero at the tangent of the reduced shift d - l.
    const double l = 30.0;
    auto z1 = shifted_conjugate_zero(u, d, lambda, lambda, l);
    REQUIRE(z1.has_value());
    const TangentPoint tp2 = tangent_point(u, d - l);
    CHECK(*z1 ==
          doctest::Approx(u.marginal(tp2.hat_d - (d - l)) / lambda).epsilon(1e-13));

    // No zero when the shift is nonnegative.
    CHECK(!shifted_conjugate_zero(u, 10.0, 1.0, 1.0, 10.0).has_value());
    CHECK(!shifted_conjugate_zero(u, 10.0, 1.0, 2.0, 20.0).has_value());

    // Generic bisection confirms the closed form.
    std::mt19937_64 rng(31);
    for (int it = 0; it < 50; ++it) {
        const CrraUtility uu(0.2 + 0.6 * uniform01(rng));
        const double dd = 20.0 + 100.0 * uniform01(rng);
        const double lam = std::exp(2.0 * (uniform01(rng) - 0.5));
        const double lam2 = lam * uniform01(rng);
        const double ll = dd * uniform01(rng) * 0.9;
        auto z = shifted_conjugate_zero(uu, dd, lam, lam2, ll);
        REQUIRE(z.has_value());
        auto f = [&](double y) {
            return conjugate(uu, dd, lam, y) + lam2 * y * ll;
        };
        const double root =
            bisect(f, *z * 1e-3, *z * 1e3, {.x_tol = *z * 1e-13, .max_iter = 200});
        CHECK(*z == doctest::Approx(root).epsilon(1e-9));
    }
}

TEST_CASE("reflected conjugate attains its minimum at the marginal of the shift") {
    // sup_x { U(x+d) - x lambda y } decreases then increases, with minimum
    // U(d) at y = U'(d)/lambda; located here by golden section search.
    const CrraUtility u(0.5);
    const double d = 60.0;
    const double lambda = 1.3;
    auto c_nu = [&](double y) {
        const double z = u.inverse_marginal(lambda * y); // = x + d at the optimum
        return u.value(z) - (z - d) * lambda * y;
    };
    double a = 1e-4, b = 1.0;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 200; ++it) {
        const double c1 = b - gr * (b - a);
        const double c2 = a + gr * (b - a);
        if (c_nu(c1) < c_nu(c2)) b = c2; else a = c1;
    }
    const double argmin = 0.5 * (a + b);
    CHECK(argmin == doctest::Approx(u.marginal(d) / lambda).epsilon(1e-6));
    CHECK(c_nu(argmin) == doctest::Approx(u.value(d)).epsilon(1e-10));
}

TEST_CASE("pre-horizon auxiliaries") {
    const MarketParams mkt = baseline_market();

    // Zero remaining horizon: growth exponent vanishes.
    CHECK(std::fabs(power_growth_exponent(mkt, 0.5, mkt.T - 1e-12)) <= 1e-10);
    CHECK_THROWS_AS(power_growth_exponent(mkt, 0.5, mkt.T), std::domain_error);

    CHECK(power_growth_exponent(mkt, 0.5, 0.0) == doctest::Approx(0.0925).epsilon(1e-13));

    // The power-shifted argument adds theta sqrt(tau) / c.
    const double t = 0.25;
    const double tau = mkt.T - t;
    for (double y : {0.5, 1.0, 2.0}) {
        CHECK(tail_argument_power(mkt, t, y, 0.5) ==
              doctest::Approx(tail_argument(mkt, t, y) +
                              mkt.theta() * std::sqrt(tau) / 0.5)
                  .epsilon(1e-13));
    }
}
