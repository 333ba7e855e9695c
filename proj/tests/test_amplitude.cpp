#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>
#include <vector>

#include "caplmm/amplitude.hpp"
#include "caplmm/errors.hpp"
#include "oracles.hpp"

using namespace caplmm;
using namespace caplmm::amp;

namespace {

DiscretizedDistribution random_distribution(unsigned qubits, std::uint64_t seed) {
    RngStream rng(seed, 0);
    DiscretizedDistribution dist;
    dist.qubits = qubits;
    const std::size_t points = std::size_t{1} << qubits;
    dist.grid.resize(points);
    dist.probs.resize(points);
    double x = 0.01 + rng.next_uniform() * 0.05;
    const double h = 0.001 + rng.next_uniform() * 0.01;
    double total = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        dist.grid[i] = x + static_cast<double>(i) * h;
        dist.probs[i] = rng.next_uniform();
        total += dist.probs[i];
    }
    for (double& p : dist.probs) p /= total;
    return dist;
}

double loaded_tail_probability(const DiscretizedDistribution& dist, double strike) {
    auto circuit = qsim::Circuit(dist.qubits + 1);
    circuit.append(load_distribution(dist));
    circuit.append(comparator(dist, strike, dist.qubits));
    qsim::StateVector state(dist.qubits + 1);
    qsim::run_circuit(circuit, state);
    return qsim::probability_of_one(state, dist.qubits);
}

} // namespace

TEST_CASE("discretize_lognormal: normalization and grid shape") {
    for (unsigned n = 1; n <= 6; ++n) {
        const auto dist = discretize_lognormal(std::log(0.05), 0.25, n);
        double total = 0.0;
        for (double p : dist.probs) total += p;
        CHECK(std::fabs(total - 1.0) < 1e-12);
        for (std::size_t i = 1; i < dist.grid.size(); ++i)
            CHECK(dist.grid[i] > dist.grid[i - 1]);
        CHECK(dist.grid.front() > 0.0);
    }
}

TEST_CASE("discretize_lognormal: degenerate zero-stdev atom") {
    const auto dist = discretize_lognormal(std::log(0.07), 0.0, 3);
    double total = 0.0;
    std::size_t atom_index = 0;
    for (std::size_t i = 0; i < dist.probs.size(); ++i) {
        total += dist.probs[i];
        if (dist.probs[i] > 0.0) atom_index = i;
    }
    CHECK(total == 1.0);
    CHECK(dist.probs[atom_index] == 1.0);
    CHECK(dist.grid[atom_index] == std::exp(std::log(0.07)));
}

TEST_CASE("discretize_lognormal: n=3 mean close to quadrature, skewness below") {
    const double log_sd = 0.25;
    const double log_mean = std::log(0.06) - 0.5 * log_sd * log_sd;
    const auto dist = discretize_lognormal(log_mean, log_sd, 3);

    double mean = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) mean += dist.probs[i] * dist.grid[i];
    const double true_mean = oracles::lognormal_moment(log_mean, log_sd, 1);
    CHECK(std::fabs(mean - true_mean) / true_mean < 0.02);

    double m2 = 0.0, m3 = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const double d = dist.grid[i] - mean;
        m2 += dist.probs[i] * d * d;
        m3 += dist.probs[i] * d * d * d;
    }
    const double disc_skew = m3 / std::pow(m2, 1.5);
    const double true_skew = oracles::lognormal_skewness(log_mean, log_sd);
    CHECK(disc_skew < true_skew);
}

TEST_CASE("load_distribution: trivial one-qubit cases") {
    DiscretizedDistribution dist;
    dist.qubits = 1;
    dist.grid = {0.05, 0.06};
    dist.probs = {1.0, 0.0};
    CHECK(load_distribution(dist).gates.empty());

    dist.probs = {0.5, 0.5};
    const auto circuit = load_distribution(dist);
    qsim::StateVector state(1);
    qsim::run_circuit(circuit, state);
    CHECK(std::abs(state.amp(0) - qsim::Amplitude{std::sqrt(0.5), 0.0}) < 1e-12);
    CHECK(std::abs(state.amp(1) - qsim::Amplitude{std::sqrt(0.5), 0.0}) < 1e-12);
}

TEST_CASE("load_distribution: amplitudes^2 reproduce probs for n <= 6") {
    for (unsigned n = 1; n <= 6; ++n) {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const auto dist = random_distribution(n, 100 * n + seed);
            const auto circuit = load_distribution(dist);
            qsim::StateVector state(n);
            qsim::run_circuit(circuit, state);
            for (std::size_t i = 0; i < dist.size(); ++i) {
                CHECK(std::fabs(std::norm(state.amp(i)) - dist.probs[i]) < 1e-9);
            }
        }
    }
}

TEST_CASE("load_distribution: lognormal round-trip on the simulator") {
    const auto dist = discretize_lognormal(std::log(0.05), 0.2, 3);
    const auto circuit = load_distribution(dist);
    qsim::StateVector state(3);
    qsim::run_circuit(circuit, state);
    for (std::size_t i = 0; i < dist.size(); ++i)
        CHECK(std::fabs(std::norm(state.amp(i)) - dist.probs[i]) < 1e-9);
}

TEST_CASE("comparator: boundary strikes") {
    const auto dist = discretize_lognormal(std::log(0.05), 0.2, 3);
    CHECK(loaded_tail_probability(dist, dist.grid.front() * 0.5) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(loaded_tail_probability(dist, dist.grid.back() * 2.0) ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("comparator: exact tail sums over 100 random instances") {
    RngStream rng(31337, 0);
    for (int instance = 0; instance < 100; ++instance) {
        const unsigned n = 1 + static_cast<unsigned>(rng.next_u64() % 4);
        const auto dist = random_distribution(n, 5000 + instance);
        const double span = dist.grid.back() - dist.grid.front();
        const double strike =
            dist.grid.front() - 0.1 * span + 1.2 * span * rng.next_uniform();

        double tail = 0.0;
        for (std::size_t i = 0; i < dist.size(); ++i)
            if (dist.grid[i] >= strike) tail += dist.probs[i];

        CHECK(loaded_tail_probability(dist, strike) ==
              doctest::Approx(tail).epsilon(1e-12));
    }
}

TEST_CASE("payoff encoding: mapped values stay in [0, 1]") {
    const auto dist = discretize_lognormal(std::log(0.05), 0.25, 4);
    const double strike = 0.05;
    const auto encoding = make_payoff_encoding(dist, strike);
    for (std::size_t i = encoding.threshold; i < dist.size(); ++i) {
        const double f = encoding.slope * dist.grid[i] + encoding.offset;
        CHECK(f >= -1e-12);
        CHECK(f <= 1.0 + 1e-12);
    }
    CHECK_THROWS_AS(make_payoff_encoding(dist, strike, 0.7), std::invalid_argument);
}

TEST_CASE("payoff_rotation: all grid below strike gives zero probability") {
    const auto dist = discretize_lognormal(std::log(0.05), 0.2, 3);
    const double strike = dist.grid.back() * 1.5;
    const auto encoding = make_payoff_encoding(dist, strike);
    CHECK(encoding.all_below(dist.size()));
    const auto problem = build_caplet_problem(dist, strike, encoding);
    qsim::StateVector state(problem.num_qubits());
    qsim::run_circuit(problem.prep, state);
    CHECK(qsim::probability_of_one(state, problem.objective) < 1e-15);
}

TEST_CASE("payoff pipeline: single atom recovers the exact payoff") {
    const double forward = 0.07, strike = 0.055;
    const auto dist = discretize_lognormal(std::log(forward), 0.0, 3);
    const auto encoding = make_payoff_encoding(dist, strike);
    const auto problem = build_caplet_problem(dist, strike, encoding);

    IqaeOptions options;
    options.mode = QaeMode::exact;
    const auto result = iqae(problem, options);
    const auto estimate =
        postprocess_payoff(result, encoding, dist, strike, 1.0, 1.0);
    CHECK(estimate.value == doctest::Approx(forward - strike).epsilon(1e-12));
}

TEST_CASE("payoff pipeline: n=3 problem matches the classical expectation") {
    const double log_sd = 0.2;
    const double log_mean = std::log(0.06) - 0.5 * log_sd * log_sd;
    const auto dist = discretize_lognormal(log_mean, log_sd, 3);
    const double strike = 0.055;
    const auto encoding = make_payoff_encoding(dist, strike, 0.25);
    const auto problem = build_caplet_problem(dist, strike, encoding);

    IqaeOptions options;
    options.mode = QaeMode::exact;
    const auto result = iqae(problem, options);
    const auto estimate = postprocess_payoff(result, encoding, dist, strike, 1.0, 1.0);

    const double classical = discretized_expected_payoff(dist, strike);
    // Documented inversion bound: 2 c^2 (x_max - K).
    const double bound = 2.0 * 0.25 * 0.25 * encoding.scale;
    CHECK(std::fabs(estimate.value - classical) <= bound);
    // In practice the concentration makes it far tighter.
    CHECK(estimate.value == doctest::Approx(classical).epsilon(0.02));
}

TEST_CASE("postprocessed value is nonincreasing in strike") {
    const double log_sd = 0.3;
    const double log_mean = std::log(0.05) - 0.5 * log_sd * log_sd;
    const auto dist = discretize_lognormal(log_mean, log_sd, 4);

    double prev = 1e300;
    for (double strike = 0.02; strike < 0.11; strike += 0.005) {
        const auto encoding = make_payoff_encoding(dist, strike);
        const auto problem = build_caplet_problem(dist, strike, encoding);
        IqaeOptions options;
        options.mode = QaeMode::exact;
        const auto result = iqae(problem, options);
        const double value =
            postprocess_payoff(result, encoding, dist, strike, 1.0, 1.0).value;
        CHECK(value <= prev + 1e-9);
        prev = value;
    }
}

TEST_CASE("iqae: exact-mode trivial amplitudes") {
    // a = 0: preparation leaves the objective untouched.
    qsim::AmplitudeOperator zero;
    zero.prep = qsim::Circuit(1);
    zero.objective = 0;
    IqaeOptions options;
    options.mode = QaeMode::exact;
    options.epsilon = 0.01;
    auto result = iqae(zero, options);
    CHECK(result.estimate == 0.0);
    CHECK(result.upper <= options.epsilon);

    qsim::AmplitudeOperator one;
    one.prep = qsim::Circuit(1);
    one.prep.append(qsim::Gate::x(0));
    one.objective = 0;
    result = iqae(one, options);
    CHECK(result.estimate == doctest::Approx(1.0));
}

TEST_CASE("iqae: shots-mode known angle within epsilon at confidence") {
    using std::numbers::pi;
    const double a = 0.3;
    qsim::AmplitudeOperator op;
    op.prep = qsim::Circuit(1);
    op.prep.append(qsim::Gate::ry(2.0 * std::asin(std::sqrt(a)), 0));
    op.objective = 0;

    IqaeOptions options;
    options.mode = QaeMode::shots;
    options.epsilon = 5e-3;
    options.alpha = 0.05;
    options.shots_per_round = 100;

    int hits = 0;
    const int runs = 200;
    for (int run = 0; run < runs; ++run) {
        RngStream rng(424242, static_cast<std::uint64_t>(run));
        const auto result = iqae(op, options, &rng);
        CHECK(result.lower <= result.estimate);
        CHECK(result.estimate <= result.upper);
        if (std::fabs(result.estimate - a) <= options.epsilon) ++hits;
    }
    CHECK(hits >= static_cast<int>((1.0 - options.alpha) * runs));
}

TEST_CASE("iqae: shots mode requires an rng") {
    qsim::AmplitudeOperator op;
    op.prep = qsim::Circuit(1);
    op.objective = 0;
    IqaeOptions options;
    options.mode = QaeMode::shots;
    CHECK_THROWS_AS(iqae(op, options, nullptr), std::invalid_argument);
}

TEST_CASE("qae_error_bound") {
    using std::numbers::pi;
    CHECK(qae_error_bound(1.0) == doctest::Approx(pi + pi * pi));
    CHECK(qae_error_bound(1e9) < 1e-8);
    CHECK_THROWS_AS(qae_error_bound(0.5), std::invalid_argument);
}

TEST_CASE("postprocess: amplitude at the encoding zero point maps to zero payoff") {
    const auto dist = discretize_lognormal(std::log(0.05), 0.2, 3);
    const auto encoding = make_payoff_encoding(dist, 0.05);
    QaeResult at_zero;
    const double c = encoding.c_approx;
    at_zero.estimate = std::pow(std::sin(std::numbers::pi / 4.0 - c), 2);
    at_zero.lower = at_zero.estimate;
    at_zero.upper = at_zero.estimate;
    at_zero.oracle_calls = 1;
    const auto estimate = postprocess_payoff(at_zero, encoding, dist, 0.05, 1.0, 0.9);
    CHECK(estimate.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("iqae: non-convergence raises estimation_error with the partial interval") {
    qsim::AmplitudeOperator op;
    op.prep = qsim::Circuit(1);
    op.prep.append(qsim::Gate::ry(2.0 * std::asin(std::sqrt(0.4)), 0));
    op.objective = 0;

    IqaeOptions options;
    options.mode = QaeMode::shots;
    options.epsilon = 1e-6; // unreachable within two rounds
    options.shots_per_round = 8;
    options.max_rounds = 2;
    RngStream rng(5, 0);
    try {
        iqae(op, options, &rng);
        FAIL("expected estimation_error");
    } catch (const estimation_error& e) {
        CHECK(e.lower() >= 0.0);
        CHECK(e.upper() <= 1.0);
        CHECK(e.lower() <= e.upper());
        CHECK(e.oracle_calls() > 0);
    }
}

TEST_CASE("iqae: epsilon and alpha domains") {
    qsim::AmplitudeOperator op;
    op.prep = qsim::Circuit(1);
    op.objective = 0;
    IqaeOptions bad;
    bad.epsilon = 0.7;
    CHECK_THROWS_AS(iqae(op, bad), std::invalid_argument);
    bad.epsilon = 1e-3;
    bad.alpha = 0.0;
    CHECK_THROWS_AS(iqae(op, bad), std::invalid_argument);
}

TEST_CASE("payoff pipeline: shots-mode value within propagated epsilon plus inversion bound") {
    const double log_sd = 0.18;
    const double log_mean = std::log(0.10) - 0.5 * log_sd * log_sd;
    const auto dist = discretize_lognormal(log_mean, log_sd, 3);
    const double strike = 0.096;
    const double c = 0.05;
    const auto encoding = make_payoff_encoding(dist, strike, c);
    const auto problem = build_caplet_problem(dist, strike, encoding);

    IqaeOptions options;
    options.mode = QaeMode::shots;
    options.epsilon = 1e-3;
    options.alpha = 0.05;
    options.shots_per_round = 100;

    const double classical = discretized_expected_payoff(dist, strike);
    // Amplitude error <= eps maps through the inversion with slope at most
    // scale/(2c cos 2c); the inversion itself is exact to 2 c^2 scale.
    const double bound = options.epsilon / (2.0 * c * std::cos(2.0 * c)) * encoding.scale
                         + 2.0 * c * c * encoding.scale;
    int ok = 0;
    const int runs = 40;
    for (int run = 0; run < runs; ++run) {
        RngStream rng(88, static_cast<std::uint64_t>(run));
        const auto result = iqae(problem, options, &rng);
        const double value =
            postprocess_payoff(result, encoding, dist, strike, 1.0, 1.0).value;
        if (std::fabs(value - classical) <= bound) ++ok;
    }
    CHECK(ok >= static_cast<int>(0.95 * runs));
}
