#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "caplmm/lmm.hpp"
#include "caplmm/rng.hpp"
#include "oracles.hpp"

using namespace caplmm;
using namespace caplmm::lmm;

namespace {

MarketDataset three_period_dataset(std::vector<double> forwards,
                                   std::vector<double> row_vols, double t0 = 1.0) {
    MarketDataset ds;
    ds.tenor = TenorStructure::annual(forwards.size(), t0);
    ds.curve.forwards = std::move(forwards);
    ds.vols = VolSurface::constant_rows(row_vols);
    ds.stub_rate = 0.0469;
    return ds;
}

} // namespace

TEST_CASE("bond_prices: zero rate and single-period identities") {
    TenorStructure tenor;
    tenor.dates = {0.0, 1.0};
    tenor.fractions = {1.0};

    ForwardCurve zero_curve{{1e-300}}; // effectively F = 0 while staying positive
    auto discount = bond_prices(zero_curve, tenor, 0.0);
    CHECK(discount.bond(1) == doctest::Approx(1.0).epsilon(1e-14));

    ForwardCurve curve{{0.05}};
    discount = bond_prices(curve, tenor, 0.0);
    CHECK(discount.bond(0) == doctest::Approx(1.0));
    CHECK(discount.bond(1) == doctest::Approx(1.0 / 1.05).epsilon(1e-15));
}

TEST_CASE("bond_prices: three periods against the telescoped product") {
    TenorStructure tenor;
    tenor.dates = {0.0, 1.0, 2.0, 3.0};
    tenor.fractions = {1.0, 1.0, 1.0};
    ForwardCurve curve{{0.04, 0.05, 0.06}};

    // Telescoping the forward-rate identity one period at a time.
    double expected = 1.0;
    expected /= 1.0 + 1.0 * 0.04;
    expected /= 1.0 + 1.0 * 0.05;
    expected /= 1.0 + 1.0 * 0.06;

    const auto discount = bond_prices(curve, tenor, 0.0);
    CHECK(discount.bond(3) == doctest::Approx(expected).epsilon(1e-15));

    // Strictly decreasing, all within (0, 1].
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(discount.bond(i + 1) < discount.bond(i));
        CHECK(discount.bond(i + 1) > 0.0);
        CHECK(discount.bond(i) <= 1.0);
    }
}

TEST_CASE("bond_prices: stub discounting from the spot rate") {
    TenorStructure tenor;
    tenor.dates = {1.0, 2.0};
    tenor.fractions = {1.0};
    ForwardCurve curve{{0.05}};
    const auto discount = bond_prices(curve, tenor, 0.0469);
    CHECK(discount.bond(0) == doctest::Approx(1.0 / 1.0469).epsilon(1e-15));
    CHECK(discount.bond(1) ==
          doctest::Approx(1.0 / (1.0469 * 1.05)).epsilon(1e-15));
}

TEST_CASE("bond_prices: dimension mismatch is rejected") {
    TenorStructure tenor;
    tenor.dates = {0.0, 1.0, 2.0};
    tenor.fractions = {1.0, 1.0};
    ForwardCurve curve{{0.04}};
    CHECK_THROWS_AS(bond_prices(curve, tenor, 0.0), std::invalid_argument);
}

TEST_CASE("caplet_vol: constant and zero rows") {
    const auto tenor = TenorStructure::annual(2); // dates {1, 2, 3}
    auto surface = VolSurface::constant_rows({0.2, 0.2});

    // Caplet 2 resets at T_1 = 2; two years of sigma = 0.2.
    CHECK(caplet_vol(surface, tenor, 2) ==
          doctest::Approx(0.2 * std::sqrt(2.0)).epsilon(1e-14));

    surface = VolSurface::constant_rows({0.0, 0.0});
    CHECK(caplet_vol(surface, tenor, 2) == 0.0);
}

TEST_CASE("caplet_vol: piecewise row against quadrature of sigma^2") {
    const auto tenor = TenorStructure::annual(2);
    VolSurface surface;
    surface.rows = {{0.1}, {0.1, 0.3}};

    const double v = caplet_vol(surface, tenor, 2);
    CHECK(v == doctest::Approx(std::sqrt(0.10)).epsilon(1e-14));

    // Independent quadrature of the piecewise-constant integrand.
    const auto sigma_sq = [&](double t) {
        return t <= 1.0 ? 0.1 * 0.1 : 0.3 * 0.3;
    };
    const double integral = oracles::integrate(sigma_sq, 0.0, 2.0, 1e-13);
    CHECK(v * v == doctest::Approx(integral).epsilon(1e-10));
}

TEST_CASE("caplet_vol: quadrature oracle at interior valuation times") {
    const auto tenor = TenorStructure::annual(3); // dates {1, 2, 3, 4}
    VolSurface surface;
    surface.rows = {{0.15}, {0.18, 0.12}, {0.2, 0.1, 0.25}};

    // sigma_3(t): 0.2 on (0,1], 0.1 on (1,2], 0.25 on (2,3].
    const auto sigma3_sq = [&](double t) {
        if (t <= 1.0) return 0.2 * 0.2;
        if (t <= 2.0) return 0.1 * 0.1;
        return 0.25 * 0.25;
    };
    for (double t : {0.0, 0.4, 1.0, 1.7, 2.9}) {
        const double v = caplet_vol(surface, tenor, 3, t);
        const double integral = oracles::integrate(sigma3_sq, t, 3.0, 1e-13);
        CHECK(v * v == doctest::Approx(integral).epsilon(1e-9));
    }

    // Variance is additive across a disjoint partition of [0, T_{i-1}].
    const double whole = caplet_vol(surface, tenor, 3, 0.0);
    const double tail = caplet_vol(surface, tenor, 3, 1.4);
    const double head = oracles::integrate(sigma3_sq, 0.0, 1.4, 1e-13);
    CHECK(whole * whole == doctest::Approx(head + tail * tail).epsilon(1e-12));
}

TEST_CASE("caplet_vol: expired caplet throws") {
    const auto tenor = TenorStructure::annual(2);
    const auto surface = VolSurface::constant_rows({0.2, 0.2});
    CHECK_THROWS_AS(caplet_vol(surface, tenor, 1, 1.0), std::domain_error);
    CHECK_THROWS_AS(caplet_vol(surface, tenor, 1, 2.5), std::domain_error);
}

TEST_CASE("normalized_caplet_vol") {
    const auto tenor = TenorStructure::annual(2);
    auto surface = VolSurface::constant_rows({0.2, 0.2});
    CHECK(normalized_caplet_vol(surface, tenor, 2) == doctest::Approx(0.2).epsilon(1e-14));

    surface = VolSurface::constant_rows({0.0, 0.0});
    CHECK(normalized_caplet_vol(surface, tenor, 2) == 0.0);

    VolSurface piecewise;
    piecewise.rows = {{0.1}, {0.1, 0.3}};
    CHECK(normalized_caplet_vol(piecewise, tenor, 2) ==
          doctest::Approx(std::sqrt(0.05)).epsilon(1e-14));

    TenorStructure zero_horizon;
    zero_horizon.dates = {0.0, 1.0};
    zero_horizon.fractions = {1.0};
    CHECK_THROWS_AS(normalized_caplet_vol(VolSurface::constant_rows({0.2}),
                                          zero_horizon, 1),
                    std::domain_error);
}

TEST_CASE("black76_caplet: zero-vol limits") {
    CHECK(black76_caplet(0.05, 0.05, 0.0, 1.0, 1.0) == 0.0);
    CHECK(black76_caplet(0.05, 0.03, 0.0, 1.0, 1.0) == doctest::Approx(0.02));
    // v -> 0 approaches the intrinsic value continuously.
    CHECK(black76_caplet(0.05, 0.03, 1e-8, 1.0, 1.0) ==
          doctest::Approx(0.02).epsilon(1e-9));
}

TEST_CASE("black76_caplet agrees with the lognormal quadrature oracle") {
    // F_T is lognormal with mean F and log-stdev v under the forward measure.
    const double F = 0.05, K = 0.04, v = 0.2, tau = 1.0, p = 0.95;
    const double log_mean = std::log(F) - 0.5 * v * v;
    const double oracle = tau * p * oracles::lognormal_call(log_mean, v, K, 1e-14);
    CHECK(black76_caplet(F, K, v, tau, p) == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("black76_caplet: domain errors and bounds") {
    CHECK_THROWS_AS(black76_caplet(-0.01, 0.05, 0.2, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(black76_caplet(0.05, -0.05, 0.2, 1.0, 1.0), std::domain_error);

    // Monotone in K (nonincreasing), in v (nondecreasing), bounded by tau*p*F,
    // and above intrinsic value.
    RngStream rng(11, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const double F = 0.01 + 0.2 * rng.next_uniform();
        const double K = 0.01 + 0.2 * rng.next_uniform();
        const double v = 0.5 * rng.next_uniform();
        const double tau = 0.25 + rng.next_uniform();
        const double p = 0.5 + 0.5 * rng.next_uniform();
        const double price = black76_caplet(F, K, v, tau, p);
        CHECK(price >= 0.0);
        CHECK(price <= tau * p * F + 1e-15);
        CHECK(price >= tau * p * std::max(F - K, 0.0) - 1e-12);
        CHECK(black76_caplet(F, K * 1.05, v, tau, p) <= price + 1e-15);
        CHECK(black76_caplet(F, K, v + 0.05, tau, p) >= price - 1e-15);
    }
}

TEST_CASE("black76_cap: singleton and zero-vol sums") {
    auto ds = three_period_dataset({0.05, 0.06, 0.07}, {0.15, 0.16, 0.17});
    CapSpec single{0.05, 2, 2, 1.0};
    const auto discount = bond_prices(ds.curve, ds.tenor, ds.stub_rate);
    const double v2 = caplet_vol(ds.vols, ds.tenor, 2);
    CHECK(black76_cap(ds, single) ==
          doctest::Approx(black76_caplet(0.06, 0.05, v2, 1.0, discount.bond(2)))
              .epsilon(1e-15));

    auto flat = three_period_dataset({0.05, 0.05, 0.05}, {0.0, 0.0, 0.0});
    CapSpec otm{0.08, 1, 3, 1.0};
    CHECK(black76_cap(flat, otm) == 0.0);
}

TEST_CASE("black76_cap scales with notional") {
    auto ds = three_period_dataset({0.05, 0.06, 0.07}, {0.15, 0.16, 0.17});
    CapSpec unit{0.05, 1, 3, 1.0};
    CapSpec big{0.05, 1, 3, 1e6};
    CHECK(black76_cap(ds, big) ==
          doctest::Approx(1e6 * black76_cap(ds, unit)).epsilon(1e-14));
}

namespace {

// Exponentially decaying inter-rate correlation; identity would zero out
// every off-measure drift term.
std::vector<std::vector<double>> decaying_correlation(std::size_t size) {
    auto rho = identity_correlation(size);
    for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = 0; j < size; ++j)
            rho[i][j] = std::exp(-0.2 * std::fabs(static_cast<double>(i) -
                                                  static_cast<double>(j)));
    return rho;
}

} // namespace

TEST_CASE("drift_mu: native measure, one-term sum, and sign symmetry") {
    const auto tenor = TenorStructure::annual(4);
    const auto surface = VolSurface::constant_rows({0.2, 0.2, 0.2, 0.2});
    const std::vector<double> forwards = {0.05, 0.05, 0.05, 0.05};
    const auto rho = decaying_correlation(4);

    for (std::size_t k = 1; k <= 4; ++k)
        CHECK(drift_mu(k, k, forwards, surface, tenor, rho, 0.0) == 0.0);

    // k = i - 1: a single summand, written out directly.
    const double expected =
        -1.0 * rho[1][2] * 0.2 * 0.2 * 0.05 / (1.0 + 1.0 * 0.05);
    CHECK(drift_mu(2, 3, forwards, surface, tenor, rho, 0.0) ==
          doctest::Approx(expected).epsilon(1e-15));

    // Swapped index roles give opposite signs; with fully symmetric inputs
    // (flat vols, flat forwards, flat correlation) the magnitudes match too.
    const std::vector<std::vector<double>> ones(4, std::vector<double>(4, 1.0));
    for (std::size_t k = 1; k <= 4; ++k) {
        for (std::size_t i = 1; i <= 4; ++i) {
            const double forward_dir = drift_mu(k, i, forwards, surface, tenor, rho, 0.0);
            const double reverse_dir = drift_mu(i, k, forwards, surface, tenor, rho, 0.0);
            if (k != i) CHECK(forward_dir * reverse_dir < 0.0);
            const double sym_fwd = drift_mu(k, i, forwards, surface, tenor, ones, 0.0);
            const double sym_rev = drift_mu(i, k, forwards, surface, tenor, ones, 0.0);
            CHECK(sym_fwd == doctest::Approx(-sym_rev).epsilon(1e-14));
        }
    }
}

TEST_CASE("drift_mu: brute-force summation oracle and |i-k| monotonicity") {
    const auto tenor = TenorStructure::annual(5);
    const auto surface = VolSurface::constant_rows({0.2, 0.18, 0.16, 0.14, 0.12});
    const std::vector<double> forwards = {0.04, 0.05, 0.06, 0.07, 0.08};
    const auto rho = decaying_correlation(5);

    for (std::size_t k = 1; k <= 5; ++k) {
        for (std::size_t i = 1; i <= 5; ++i) {
            // Oracle: loop over every j, with indicator selection.
            double sum = 0.0;
            for (std::size_t j = 1; j <= 5; ++j) {
                const bool in_lower = (k < i) && (j > k) && (j <= i);
                const bool in_upper = (k > i) && (j > i) && (j <= k);
                if (!in_lower && !in_upper) continue;
                const double term = tenor.fractions[j - 1] * rho[k - 1][j - 1] *
                                    surface.value(k, 1) * surface.value(j, 1) *
                                    forwards[j - 1] /
                                    (1.0 + tenor.fractions[j - 1] * forwards[j - 1]);
                sum += in_lower ? -term : term;
            }
            CHECK(drift_mu(k, i, forwards, surface, tenor, rho, 0.0) ==
                  doctest::Approx(sum).epsilon(1e-13));
        }
    }

    // Constant inputs and full correlation: |mu| grows with |i - k|.
    const auto flat_surface = VolSurface::constant_rows({0.2, 0.2, 0.2, 0.2, 0.2});
    const std::vector<double> flat_forwards(5, 0.05);
    std::vector<std::vector<double>> ones(5, std::vector<double>(5, 1.0));
    double prev = 0.0;
    for (std::size_t i = 2; i <= 5; ++i) {
        const double mu =
            std::fabs(drift_mu(1, i, flat_forwards, flat_surface, tenor, ones, 0.0));
        CHECK(mu > prev);
        prev = mu;
    }
}

TEST_CASE("black76_cap: benchmark-shaped cap against per-caplet quadrature") {
    MarketDataset ds;
    ds.tenor = TenorStructure::annual(3, 1.0);
    ds.curve.forwards = {0.093, 0.103, 0.1125};
    ds.vols = VolSurface::constant_rows({0.16, 0.15, 0.14});
    ds.stub_rate = 0.0469;
    const CapSpec spec{0.096, 1, 3, 1.0};

    const auto discount = bond_prices(ds.curve, ds.tenor, ds.stub_rate);
    double expected = 0.0;
    for (std::size_t i = 1; i <= 3; ++i) {
        const double v = caplet_vol(ds.vols, ds.tenor, i);
        const double log_mean = std::log(ds.curve.forward(i)) - 0.5 * v * v;
        expected += discount.bond(i) *
                    oracles::lognormal_call(log_mean, v, spec.strike, 1e-15);
    }
    CHECK(black76_cap(ds, spec) == doctest::Approx(expected).epsilon(1e-9));
}
