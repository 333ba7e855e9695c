#include "caplmm/pricers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include "caplmm/errors.hpp"
#include "caplmm/parallel.hpp"
#include "caplmm/stats.hpp"

namespace caplmm::pricers {

namespace {

constexpr std::uint64_t kHybridStreamTag = 0x48594252ULL; // "HYBR"
constexpr std::uint64_t kPureStreamTag = 0x50555245ULL;   // "PURE"
constexpr std::uint64_t kTrialTag = 0x5452494CULL;        // "TRIL"

std::uint64_t double_bits(double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof(bits));
    return bits;
}

struct ConditionalKey {
    std::uint64_t log_mean_bits;
    std::uint64_t log_sd_bits;

    bool operator==(const ConditionalKey& other) const {
        return log_mean_bits == other.log_mean_bits && log_sd_bits == other.log_sd_bits;
    }
};

struct ConditionalKeyHash {
    std::size_t operator()(const ConditionalKey& key) const {
        return static_cast<std::size_t>(
            mix64(key.log_mean_bits ^ mix64(key.log_sd_bits)));
    }
};

/// Discretize-load-estimate-invert for one conditional lognormal.
mc::PriceEstimate conditional_qae(double log_mean, double log_sd, double strike,
                                  double tau, double discount, const MethodConfig& cfg,
                                  RngStream* rng) {
    const auto dist = amp::discretize_lognormal(log_mean, log_sd, cfg.qubits_per_year,
                                                cfg.grid_span);
    const auto encoding = amp::make_payoff_encoding(dist, strike, cfg.c_approx);
    if (encoding.all_below(dist.size()))
        return mc::PriceEstimate{0.0, 0.0, 0, mc::Method::hybrid};
    const auto problem = amp::build_caplet_problem(dist, strike, encoding);
    amp::IqaeOptions options;
    options.epsilon = cfg.epsilon;
    options.alpha = cfg.alpha;
    options.mode = cfg.mode;
    options.shots_per_round = cfg.shots_per_round;
    const auto result = amp::iqae(problem, options, rng);
    return amp::postprocess_payoff(result, encoding, dist, strike, tau, discount,
                                   mc::Method::hybrid);
}

} // namespace

mc::PriceEstimate hybrid_cap_price(const lmm::MarketDataset& dataset,
                                   const lmm::CapSpec& spec, const MethodConfig& cfg) {
    dataset.validate();
    spec.validate(dataset.periods());
    if (cfg.paths < 1)
        throw std::invalid_argument("hybrid_cap_price: need at least one path");
    if (cfg.qubits_per_year + 2 > cfg.max_statevector_qubits)
        throw capacity_error("hybrid_cap_price: conditional problem needs " +
                                 std::to_string(cfg.qubits_per_year + 2) +
                                 " qubits, above the configured budget",
                             cfg.qubits_per_year + 2);

    const lmm::DiscountCurve discount =
        lmm::bond_prices(dataset.curve, dataset.tenor, dataset.stub_rate);

    double value = 0.0;
    double variance = 0.0;
    for (std::size_t i = spec.first_caplet; i <= spec.last_caplet; ++i) {
        const double tau = dataset.tenor.fractions[i - 1];
        const double disc = discount.bond(i);
        const double final_dt =
            dataset.tenor.year_end(i) - dataset.tenor.year_start(i);
        const double sigma_final = dataset.vols.value(i, i);
        const std::uint64_t caplet_seed = derive_seed(cfg.seed, kHybridStreamTag, i);

        const auto conditional = [&](double conditioning_rate, RngStream* rng) {
            const double log_sd = sigma_final * std::sqrt(final_dt);
            const double log_mean =
                std::log(conditioning_rate) - 0.5 * sigma_final * sigma_final * final_dt;
            return conditional_qae(log_mean, log_sd, spec.strike, tau, disc, cfg, rng);
        };

        if (i == 1) {
            // Whole horizon is a single QAE step; no MC prefix. The QAE
            // interval is the only dispersion this caplet carries.
            RngStream rng(caplet_seed, 0);
            const auto estimate = conditional(dataset.curve.forward(i), &rng);
            value += estimate.value;
            variance += estimate.std_error * estimate.std_error;
            continue;
        }

        std::unordered_map<ConditionalKey, double, ConditionalKeyHash> memo;
        std::mutex memo_mutex;
        const bool use_memo = cfg.mode == amp::QaeMode::exact;

        const std::uint64_t paths = cfg.paths;
        constexpr std::uint64_t kChunk = 1024;
        const std::uint64_t n_chunks = (paths + kChunk - 1) / kChunk;
        std::vector<RunningMoments> partials(n_chunks);

        chunked_parallel_for(paths, cfg.threads, kChunk,
                             [&](std::uint64_t c, std::uint64_t first, std::uint64_t last) {
            RunningMoments m;
            for (std::uint64_t path = first; path < last; ++path) {
                RngStream rng(caplet_seed, path);
                double forward = dataset.curve.forward(i);
                for (std::size_t year = 1; year + 1 <= i; ++year) {
                    const double dt =
                        dataset.tenor.year_end(year) - dataset.tenor.year_start(year);
                    if (dt <= 0.0) continue;
                    forward = mc::gbm_step(forward, dataset.vols.value(i, year), dt,
                                           rng.next_gaussian());
                }

                double v;
                if (use_memo) {
                    const double log_sd = sigma_final * std::sqrt(final_dt);
                    const ConditionalKey key{
                        double_bits(std::log(forward) -
                                    0.5 * sigma_final * sigma_final * final_dt),
                        double_bits(log_sd)};
                    {
                        std::lock_guard<std::mutex> lock(memo_mutex);
                        auto it = memo.find(key);
                        if (it != memo.end()) {
                            m.add(it->second);
                            continue;
                        }
                    }
                    v = conditional(forward, nullptr).value;
                    std::lock_guard<std::mutex> lock(memo_mutex);
                    memo.emplace(key, v);
                } else {
                    v = conditional(forward, &rng).value;
                }
                m.add(v);
            }
            partials[c] = m;
        });

        RunningMoments moments;
        for (const RunningMoments& m : partials) moments.combine(m);
        value += moments.mean;
        variance += moments.mean_variance();
    }

    mc::PriceEstimate estimate;
    estimate.value = spec.notional * value;
    estimate.std_error = spec.notional * std::sqrt(variance);
    estimate.n_samples = cfg.paths;
    estimate.method = mc::Method::hybrid;
    return estimate;
}

mc::PriceEstimate pure_quantum_cap_price(const lmm::MarketDataset& dataset,
                                         const lmm::CapSpec& spec,
                                         const MethodConfig& cfg) {
    dataset.validate();
    spec.validate(dataset.periods());

    const lmm::DiscountCurve discount =
        lmm::bond_prices(dataset.curve, dataset.tenor, dataset.stub_rate);

    // Fail fast on capacity before any register is allocated or priced.
    for (std::size_t i = spec.first_caplet; i <= spec.last_caplet; ++i) {
        const unsigned problem_qubits =
            cfg.qubits_per_year * static_cast<unsigned>(i) + 2;
        if (problem_qubits > cfg.max_statevector_qubits)
            throw capacity_error(
                "pure_quantum_cap_price: caplet " + std::to_string(i) + " needs " +
                    std::to_string(problem_qubits) +
                    " qubits, above the configured budget of " +
                    std::to_string(cfg.max_statevector_qubits),
                problem_qubits);
    }

    double value = 0.0;
    double variance = 0.0;
    std::uint64_t oracle_calls = 0;
    for (std::size_t i = spec.first_caplet; i <= spec.last_caplet; ++i) {
        const unsigned register_qubits =
            cfg.qubits_per_year * static_cast<unsigned>(i);
        const double v = lmm::caplet_vol(dataset.vols, dataset.tenor, i, 0.0);
        const double log_mean = std::log(dataset.curve.forward(i)) - 0.5 * v * v;
        const auto dist =
            amp::discretize_lognormal(log_mean, v, register_qubits, cfg.grid_span);
        const auto encoding = amp::make_payoff_encoding(dist, spec.strike, cfg.c_approx);

        const double tau = dataset.tenor.fractions[i - 1];
        const double disc = discount.bond(i);
        if (encoding.all_below(dist.size())) continue;

        const auto problem = amp::build_caplet_problem(dist, spec.strike, encoding);
        amp::IqaeOptions options;
        options.epsilon = cfg.epsilon;
        options.alpha = cfg.alpha;
        options.mode = cfg.mode;
        options.shots_per_round = cfg.shots_per_round;
        RngStream rng(derive_seed(cfg.seed, kPureStreamTag, i), 0);
        const auto result = amp::iqae(problem, options, &rng);
        const auto caplet = amp::postprocess_payoff(result, encoding, dist, spec.strike,
                                                    tau, disc, mc::Method::pure_quantum);
        value += caplet.value;
        variance += caplet.std_error * caplet.std_error;
        oracle_calls += result.oracle_calls;
    }

    mc::PriceEstimate estimate;
    estimate.value = spec.notional * value;
    estimate.std_error = spec.notional * std::sqrt(variance);
    estimate.n_samples = std::max<std::uint64_t>(oracle_calls, 1);
    estimate.method = mc::Method::pure_quantum;
    return estimate;
}

mc::PriceEstimate price(const lmm::MarketDataset& dataset, const lmm::CapSpec& spec,
                        const MethodConfig& cfg) {
    switch (cfg.method) {
        case mc::Method::classical:
            return mc::mc_cap_price(dataset, spec, cfg.paths, cfg.seed, cfg.threads);
        case mc::Method::hybrid:
            return hybrid_cap_price(dataset, spec, cfg);
        case mc::Method::pure_quantum:
            return pure_quantum_cap_price(dataset, spec, cfg);
        case mc::Method::analytic: {
            mc::PriceEstimate estimate;
            estimate.value = lmm::black76_cap(dataset, spec);
            estimate.method = mc::Method::analytic;
            return estimate;
        }
    }
    throw std::invalid_argument("price: unknown method");
}

QubitBreakdown qubit_count(std::uint64_t n, std::uint64_t T) {
    if (n < 1 || T < 1)
        throw std::invalid_argument("qubit_count: need n >= 1 and T >= 1");
    QubitBreakdown q;
    q.loading = n * T * (T + 1) / 2; // (n + nT) T / 2
    q.comparator = q.loading + 1;
    q.y_rotation = 1;
    q.total = q.loading + q.comparator + q.y_rotation;
    return q;
}

std::vector<ConvergenceRecord> convergence_experiment(
    const lmm::MarketDataset& dataset, const lmm::CapSpec& spec,
    const std::vector<mc::Method>& methods, const std::vector<std::uint64_t>& path_grid,
    unsigned trials, const MethodConfig& base) {
    if (trials < 1)
        throw std::invalid_argument("convergence_experiment: need at least one trial");
    if (methods.empty() || path_grid.empty())
        throw std::invalid_argument("convergence_experiment: empty method or path grid");

    const double analytic = lmm::black76_cap(dataset, spec);
    const std::uint64_t n_tasks =
        static_cast<std::uint64_t>(methods.size()) * path_grid.size() * trials;
    std::vector<ConvergenceRecord> records(n_tasks);

    chunked_parallel_for(n_tasks, base.threads, 1,
                         [&](std::uint64_t task, std::uint64_t, std::uint64_t) {
        const std::size_t per_method = path_grid.size() * trials;
        const std::size_t m_idx = task / per_method;
        const std::size_t rem = task % per_method;
        const std::size_t p_idx = rem / trials;
        const unsigned trial = static_cast<unsigned>(rem % trials);

        MethodConfig cfg = base;
        cfg.method = methods[m_idx];
        cfg.paths = path_grid[p_idx];
        cfg.threads = 1; // parallelism lives at the task level here
        cfg.seed = derive_seed(base.seed, kTrialTag,
                               derive_seed(static_cast<std::uint64_t>(m_idx),
                                           cfg.paths, trial));
        const auto estimate = price(dataset, spec, cfg);
        records[task] = ConvergenceRecord{cfg.method, cfg.paths, trial, estimate.value,
                                          std::fabs(estimate.value - analytic)};
    });
    return records;
}

std::vector<QubitSweepPoint> qubit_sweep_experiment(const lmm::MarketDataset& dataset,
                                                    const lmm::CapSpec& spec,
                                                    const std::vector<unsigned>& n_values,
                                                    unsigned trials,
                                                    const MethodConfig& base) {
    if (trials < 2)
        throw std::invalid_argument("qubit_sweep_experiment: need at least two trials");

    std::vector<QubitSweepPoint> points;
    points.reserve(n_values.size());
    for (unsigned n : n_values) {
        std::vector<double> estimates(trials);
        chunked_parallel_for(trials, base.threads, 1,
                             [&](std::uint64_t trial, std::uint64_t, std::uint64_t) {
            MethodConfig cfg = base;
            cfg.method = mc::Method::pure_quantum;
            cfg.qubits_per_year = n;
            cfg.threads = 1;
            cfg.seed = derive_seed(base.seed, 0x53574550ULL /* "SWEP" */,
                                   derive_seed(n, trial, 0));
            estimates[trial] = pure_quantum_cap_price(dataset, spec, cfg).value;
        });
        const SampleSummary summary = summarize(estimates);
        QubitSweepPoint point;
        point.qubits_per_year = n;
        point.mean = summary.mean;
        point.stdev = summary.stdev;
        const double half = 1.959963984540054 * summary.std_error();
        point.ci_lower = summary.mean - half;
        point.ci_upper = summary.mean + half;
        point.trials = trials;
        points.push_back(point);
    }
    return points;
}

} // namespace caplmm::pricers
