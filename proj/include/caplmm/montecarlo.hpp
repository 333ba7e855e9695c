#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "caplmm/lmm.hpp"
#include "caplmm/rng.hpp"

namespace caplmm::mc {

enum class Method { classical, hybrid, pure_quantum, analytic };

std::string_view method_name(Method method);
Method method_from_name(std::string_view name);

/// Common output of every pricer.
struct PriceEstimate {
    double value = 0.0;
    double std_error = 0.0;      // CLT standard error (or propagated CI half-width)
    std::uint64_t n_samples = 0; // paths or oracle calls; 0 for analytic
    Method method = Method::analytic;
};

/// One exact-in-law GBM tenor step: F * exp(sqrt(dt) sigma z - sigma^2 dt / 2).
double gbm_step(double forward, double sigma, double dt, double z);

/// tau * (L - K)^+.
double caplet_payoff(double realized_rate, double strike, double fraction);

/// Terminal rate F_i(T_{i-1}) under the T_i-forward measure (zero drift),
/// chaining one GBM step per volatility year. Zero-length years are skipped,
/// so a caplet with T_{i-1} = 0 returns F_i(0) untouched.
double simulate_caplet_terminal(const lmm::MarketDataset& dataset, std::size_t caplet,
                                RngStream& rng);

/// Classical Monte Carlo cap price with `paths` paths per caplet, each caplet
/// on an independent substream. Per-caplet standard errors aggregate in
/// root-sum-square. Paths accumulate in fixed-size chunks combined in index
/// order, so results are bit-identical for any thread count.
PriceEstimate mc_cap_price(const lmm::MarketDataset& dataset, const lmm::CapSpec& spec,
                           std::uint64_t paths, std::uint64_t seed, unsigned threads = 1);

/// CLT error scale sigma / sqrt(n).
double mc_error_model(double sample_stdev, std::uint64_t n_samples);

/// Joint terminal rates (F_1(T_0), ..., F_M(T_{M-1})) per path, evolved under
/// the terminal measure Q^M with log-Euler yearly steps and correlated
/// Gaussian increments. Throws std::invalid_argument when `rho` is not a
/// valid (symmetric, unit-diagonal, positive-semidefinite) correlation matrix.
std::vector<std::vector<double>> simulate_terminal_measure(
    const lmm::MarketDataset& dataset, const std::vector<std::vector<double>>& rho,
    std::uint64_t paths, std::uint64_t seed);

/// Substream id for (caplet, path); documented so experiments can be replayed.
std::uint64_t caplet_path_stream(std::size_t caplet, std::uint64_t path);

} // namespace caplmm::mc
