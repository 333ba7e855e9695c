#include "caplmm/montecarlo.hpp"

#include <cmath>
#include <stdexcept>

#include "caplmm/parallel.hpp"
#include "caplmm/stats.hpp"

namespace caplmm::mc {

namespace {

constexpr std::uint64_t kPathChunk = 8192;

// Caplet label used when deriving the per-caplet substream family.
constexpr std::uint64_t kCapletStreamTag = 0x43415054ULL; // "CAPT"


// PSD Cholesky with zero-pivot handling; throws on an indefinite matrix.
std::vector<std::vector<double>> cholesky_psd(const std::vector<std::vector<double>>& rho) {
    const std::size_t n = rho.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (rho[i].size() != n)
            throw std::invalid_argument("correlation matrix must be square");
        if (std::fabs(rho[i][i] - 1.0) > 1e-12)
            throw std::invalid_argument("correlation matrix must have unit diagonal");
        for (std::size_t j = 0; j < n; ++j)
            if (std::fabs(rho[i][j] - rho[j][i]) > 1e-12)
                throw std::invalid_argument("correlation matrix must be symmetric");
    }
    std::vector<std::vector<double>> chol(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = rho[i][j];
            for (std::size_t k = 0; k < j; ++k) s -= chol[i][k] * chol[j][k];
            if (i == j) {
                if (s < -1e-10)
                    throw std::invalid_argument(
                        "correlation matrix is not positive semidefinite");
                chol[i][i] = std::sqrt(std::max(s, 0.0));
            } else {
                chol[i][j] = (chol[j][j] > 0.0) ? s / chol[j][j] : 0.0;
            }
        }
    }
    return chol;
}

} // namespace

std::string_view method_name(Method method) {
    switch (method) {
        case Method::classical: return "classical";
        case Method::hybrid: return "hybrid";
        case Method::pure_quantum: return "pure-quantum";
        case Method::analytic: return "analytic";
    }
    return "unknown";
}

Method method_from_name(std::string_view name) {
    if (name == "classical") return Method::classical;
    if (name == "hybrid") return Method::hybrid;
    if (name == "pure-quantum" || name == "pure") return Method::pure_quantum;
    if (name == "analytic") return Method::analytic;
    throw std::invalid_argument("unknown method name: " + std::string(name));
}

double gbm_step(double forward, double sigma, double dt, double z) {
    if (forward <= 0.0) throw std::invalid_argument("gbm_step: forward must be positive");
    if (sigma < 0.0) throw std::invalid_argument("gbm_step: sigma must be nonnegative");
    if (dt <= 0.0) throw std::invalid_argument("gbm_step: dt must be positive");
    return forward * std::exp(std::sqrt(dt) * sigma * z - 0.5 * sigma * sigma * dt);
}

double caplet_payoff(double realized_rate, double strike, double fraction) {
    if (fraction <= 0.0) throw std::invalid_argument("caplet_payoff: fraction must be positive");
    return fraction * std::max(realized_rate - strike, 0.0);
}

double simulate_caplet_terminal(const lmm::MarketDataset& dataset, std::size_t caplet,
                                RngStream& rng) {
    if (caplet < 1 || caplet > dataset.periods())
        throw std::invalid_argument("simulate_caplet_terminal: caplet out of range");
    double forward = dataset.curve.forward(caplet);
    for (std::size_t year = 1; year <= caplet; ++year) {
        const double dt = dataset.tenor.year_end(year) - dataset.tenor.year_start(year);
        if (dt <= 0.0) continue;
        forward = gbm_step(forward, dataset.vols.value(caplet, year), dt,
                           rng.next_gaussian());
    }
    return forward;
}

std::uint64_t caplet_path_stream(std::size_t caplet, std::uint64_t path) {
    return (static_cast<std::uint64_t>(caplet) << 40) ^ path;
}

PriceEstimate mc_cap_price(const lmm::MarketDataset& dataset, const lmm::CapSpec& spec,
                           std::uint64_t paths, std::uint64_t seed, unsigned threads) {
    dataset.validate();
    spec.validate(dataset.periods());
    if (paths < 2)
        throw std::invalid_argument("mc_cap_price: need at least 2 paths per caplet");

    const lmm::DiscountCurve discount =
        lmm::bond_prices(dataset.curve, dataset.tenor, dataset.stub_rate);

    double value = 0.0;
    double variance = 0.0;
    for (std::size_t i = spec.first_caplet; i <= spec.last_caplet; ++i) {
        const double tau = dataset.tenor.fractions[i - 1];
        const double disc = discount.bond(i);
        const std::uint64_t caplet_seed = derive_seed(seed, kCapletStreamTag, i);

        const std::uint64_t n_chunks = (paths + kPathChunk - 1) / kPathChunk;
        std::vector<RunningMoments> partials(n_chunks);
        chunked_parallel_for(paths, threads, kPathChunk,
                             [&](std::uint64_t c, std::uint64_t first, std::uint64_t last) {
            RunningMoments m;
            for (std::uint64_t path = first; path < last; ++path) {
                RngStream rng(caplet_seed, path);
                const double terminal = simulate_caplet_terminal(dataset, i, rng);
                m.add(disc * caplet_payoff(terminal, spec.strike, tau));
            }
            partials[c] = m;
        });

        RunningMoments moments;
        for (const RunningMoments& m : partials) moments.combine(m);
        value += moments.mean;
        variance += moments.mean_variance();
    }

    PriceEstimate estimate;
    estimate.value = spec.notional * value;
    estimate.std_error = spec.notional * std::sqrt(variance);
    estimate.n_samples = paths;
    estimate.method = Method::classical;
    return estimate;
}

double mc_error_model(double sample_stdev, std::uint64_t n_samples) {
    if (n_samples < 1) throw std::invalid_argument("mc_error_model: need n >= 1");
    if (sample_stdev < 0.0)
        throw std::invalid_argument("mc_error_model: stdev must be nonnegative");
    return sample_stdev / std::sqrt(static_cast<double>(n_samples));
}

std::vector<std::vector<double>> simulate_terminal_measure(
    const lmm::MarketDataset& dataset, const std::vector<std::vector<double>>& rho,
    std::uint64_t paths, std::uint64_t seed) {
    dataset.validate();
    const std::size_t m = dataset.periods();
    if (rho.size() != m)
        throw std::invalid_argument("simulate_terminal_measure: correlation size mismatch");
    const auto chol = cholesky_psd(rho);

    std::vector<std::vector<double>> terminals(paths, std::vector<double>(m, 0.0));
    std::vector<double> forwards(m), z(m), eps(m);
    for (std::uint64_t path = 0; path < paths; ++path) {
        RngStream rng(derive_seed(seed, 0x544D4541ULL /* "TMEA" */, 0), path);
        for (std::size_t i = 0; i < m; ++i) forwards[i] = dataset.curve.forwards[i];

        for (std::size_t year = 1; year <= m; ++year) {
            const double t0 = dataset.tenor.year_start(year);
            const double dt = dataset.tenor.year_end(year) - t0;
            for (std::size_t i = 0; i < m; ++i) z[i] = rng.next_gaussian();
            if (dt > 0.0) {
                for (std::size_t i = 0; i < m; ++i) {
                    eps[i] = 0.0;
                    for (std::size_t j = 0; j <= i; ++j) eps[i] += chol[i][j] * z[j];
                }
                // Rates k >= year are still alive through this step.
                for (std::size_t k = year; k <= m; ++k) {
                    const double sigma = dataset.vols.value(k, year);
                    const double mu =
                        lmm::drift_mu(k, m, forwards, dataset.vols, dataset.tenor, rho, t0);
                    forwards[k - 1] *= std::exp((mu - 0.5 * sigma * sigma) * dt +
                                                sigma * std::sqrt(dt) * eps[k - 1]);
                }
            }
            terminals[path][year - 1] = forwards[year - 1]; // F_year(T_{year-1}) fixes here
        }
    }
    return terminals;
}

} // namespace caplmm::mc
