#pragma once

#include <cstdint>
#include <vector>

#include "caplmm/amplitude.hpp"
#include "caplmm/lmm.hpp"
#include "caplmm/montecarlo.hpp"

namespace caplmm::pricers {

/// Shared configuration for the estimation methods and experiments.
struct MethodConfig {
    mc::Method method = mc::Method::classical;
    std::uint64_t paths = 10'000;      // MC paths per caplet (classical/hybrid)
    unsigned qubits_per_year = 3;      // n: loading qubits per year of maturity
    double epsilon = 1e-3;             // IQAE target half-width
    double alpha = 0.05;               // IQAE failure probability
    std::uint64_t seed = 0;
    unsigned trials = 1;               // repetitions for error curves
    amp::QaeMode mode = amp::QaeMode::exact;
    unsigned shots_per_round = 128;    // IQAE shots per round (shots mode)
    double c_approx = 0.05;            // payoff-encoding approximation scale
    double grid_span = 3.3;            // discretization bounds in stdevs
    unsigned threads = 1;
    unsigned max_statevector_qubits = 24; // per-problem register budget
};

/// Hybrid pricer: per caplet, classical GBM paths to the second-last reset,
/// then amplitude estimation of the final-year conditional expectation per
/// path. The first caplet has no MC prefix; its whole horizon is one QAE
/// step. In exact mode, repeated conditioning values reuse the memoized QAE
/// result (bit-identical, so results do not change).
mc::PriceEstimate hybrid_cap_price(const lmm::MarketDataset& dataset,
                                   const lmm::CapSpec& spec, const MethodConfig& cfg);

/// Pure-quantum pricer: each caplet's full-horizon terminal lognormal is
/// discretized on n*i qubits, estimated with IQAE, post-processed and
/// discounted, then the caplets are summed. Throws capacity_error naming
/// the required register when a problem exceeds the statevector budget.
mc::PriceEstimate pure_quantum_cap_price(const lmm::MarketDataset& dataset,
                                         const lmm::CapSpec& spec,
                                         const MethodConfig& cfg);

/// Dispatch on cfg.method (classical MC, hybrid, pure-quantum, or analytic).
mc::PriceEstimate price(const lmm::MarketDataset& dataset, const lmm::CapSpec& spec,
                        const MethodConfig& cfg);

/// Qubit accounting for the pure quantum circuit with n loading qubits per
/// year and duration T (estimator sampling qubits excluded).
struct QubitBreakdown {
    std::uint64_t loading = 0;    // (n + nT) T / 2
    std::uint64_t comparator = 0; // loading + 1
    std::uint64_t y_rotation = 0; // 1
    std::uint64_t total = 0;
};

QubitBreakdown qubit_count(std::uint64_t n, std::uint64_t T);

struct ConvergenceRecord {
    mc::Method method;
    std::uint64_t paths;
    unsigned trial;
    double estimate;
    double abs_error; // versus the analytic Black-76 value
};

/// Runs each method at each path count for `trials` independent derived
/// seeds; records per-run estimates and absolute errors against
/// black76_cap. Fully reproducible from (config, seed); trials execute in
/// parallel with results slotted in deterministic order.
std::vector<ConvergenceRecord> convergence_experiment(
    const lmm::MarketDataset& dataset, const lmm::CapSpec& spec,
    const std::vector<mc::Method>& methods, const std::vector<std::uint64_t>& path_grid,
    unsigned trials, const MethodConfig& base);

struct QubitSweepPoint {
    unsigned qubits_per_year;
    double mean;
    double stdev;
    double ci_lower; // 95% confidence interval on the mean
    double ci_upper;
    unsigned trials;
};

/// Repeats pure-quantum pricing per n with per-trial derived seeds and
/// reports mean, standard deviation and a 95% CI. In exact mode every trial
/// coincides and the interval has zero width.
std::vector<QubitSweepPoint> qubit_sweep_experiment(const lmm::MarketDataset& dataset,
                                                    const lmm::CapSpec& spec,
                                                    const std::vector<unsigned>& n_values,
                                                    unsigned trials,
                                                    const MethodConfig& base);

} // namespace caplmm::pricers
