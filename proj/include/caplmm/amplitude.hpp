#pragma once

#include <cstdint>
#include <vector>

#include "caplmm/montecarlo.hpp"
#include "caplmm/qsim.hpp"
#include "caplmm/rng.hpp"

namespace caplmm::amp {

/// Lognormal discretized onto a 2^n grid: equally spaced rate values with
/// PDF-sampled, renormalized probabilities. Basis state |i> of the loading
/// register (little-endian) represents grid[i].
struct DiscretizedDistribution {
    std::vector<double> grid;  // strictly increasing, positive
    std::vector<double> probs; // nonnegative, sums to 1 within 1e-12
    unsigned qubits = 0;
    double log_mean = 0.0;     // parameters of the source lognormal
    double log_stdev = 0.0;

    std::size_t size() const { return grid.size(); }
    double spacing() const;
};

/// Grid spans [max(floor_eps, m - span*s), m + span*s] where m, s are the
/// lognormal's mean and standard deviation. log_stdev = 0 degenerates to a
/// single atom of mass 1 sitting exactly at exp(log_mean).
DiscretizedDistribution discretize_lognormal(double log_mean, double log_stdev,
                                             unsigned qubits, double span = 3.3,
                                             double floor_eps = 1e-9);

/// Linear payoff-to-amplitude map. For grid points at or above the strike,
/// the normalized payoff f(x) = slope*x + offset = (x - K)/(x_max - K) lands
/// in [0, 1] and the objective qubit is rotated to
///   P(1) = sin^2(c_approx*(2 f(x) - 1) + pi/4);
/// below the strike the objective encodes f = 0. `threshold` is the first
/// grid index with x >= K; threshold == 2^n flags the all-below short
/// circuit (payoff identically zero, objective probability 0).
struct PayoffEncoding {
    std::size_t threshold = 0;
    double slope = 0.0;
    double offset = 0.0;
    double c_approx = 0.05;
    double scale = 0.0; // x_max - K; payoff units per unit of f

    bool all_below(std::size_t grid_size) const { return threshold >= grid_size; }
};

PayoffEncoding make_payoff_encoding(const DiscretizedDistribution& dist,
                                    double strike, double c_approx = 0.05);

/// State-preparation circuit taking |0...0> to sum_i sqrt(p_i) |i> through a
/// binary tree of (multi-)controlled RY rotations on qubits [0, n).
qsim::Circuit load_distribution(const DiscretizedDistribution& dist);

/// Flips `ancilla` exactly on basis states with grid[i] >= strike. The
/// threshold index is precomputed classically and the index set above it is
/// covered by dyadic blocks, one multi-controlled X each.
qsim::Circuit comparator(const DiscretizedDistribution& dist, double strike,
                         unsigned ancilla);

/// Controlled-RY payoff block: conditioned on the comparator ancilla the
/// objective rotation angle is linear in the grid index (offset plus one
/// binary-weighted term per index qubit); with the ancilla clear it encodes
/// the zero payoff. Returns an empty fragment when x_max <= strike.
qsim::Circuit payoff_rotation(const DiscretizedDistribution& dist, double strike,
                              const PayoffEncoding& encoding, unsigned ancilla,
                              unsigned objective);

/// Full caplet estimation problem on n+2 qubits: loading on [0, n),
/// comparator ancilla at n, objective at n+1.
qsim::AmplitudeOperator build_caplet_problem(const DiscretizedDistribution& dist,
                                             double strike,
                                             const PayoffEncoding& encoding);

enum class QaeMode { exact, shots };

struct IqaeOptions {
    double epsilon = 1e-3;        // target half-width on a
    double alpha = 0.05;          // failure probability
    QaeMode mode = QaeMode::exact;
    unsigned shots_per_round = 128;
    unsigned max_rounds = 10000;
};

/// Amplitude estimate with confidence interval. `oracle_calls` is
/// M = sum over rounds of (2k + 1): the applications of A in each round's
/// circuit Q^k A (each Q contains one A and one A-inverse), counted once
/// per round regardless of how many shots the round takes. This is the
/// convention under which the pi/M + pi^2/M^2 error law is stated; the
/// shot-weighted total is kept separately in `total_shots`.
struct QaeResult {
    double estimate = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    std::uint64_t oracle_calls = 0;
    std::uint64_t total_shots = 0;
    unsigned rounds = 0;
};

/// Iterative amplitude estimation without QFT. Maintains a confidence
/// interval on the Grover angle, at each round choosing the largest power k
/// that keeps (2k+1)*theta inside an unambiguous half-plane, and tightens
/// the interval with Chernoff-Hoeffding bounds on the measured counts.
/// In exact mode the simulator probability is read directly and the
/// interval collapses to a point in a single k = 0 round.
QaeResult iqae(const qsim::AmplitudeOperator& problem, const IqaeOptions& options,
               RngStream* rng = nullptr);

/// pi/M + pi^2/M^2.
double qae_error_bound(double oracle_calls);

/// Inverts the amplitude encoding back to an expectation of (x - K)^+ and
/// applies tau * discount; interval endpoints map through the same
/// inversion into std_error (half the mapped interval width).
mc::PriceEstimate postprocess_payoff(const QaeResult& result,
                                     const PayoffEncoding& encoding,
                                     const DiscretizedDistribution& dist,
                                     double strike, double fraction, double discount,
                                     mc::Method method = mc::Method::pure_quantum);

/// Classical discretized expectation sum_i p_i (x_i - K)^+ — the exact value
/// the amplitude pipeline approximates; exposed for diagnostics.
double discretized_expected_payoff(const DiscretizedDistribution& dist, double strike);

} // namespace caplmm::amp
