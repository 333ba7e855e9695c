#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace caplmm::lmm {

/// Tenor structure T_0 < T_1 < ... < T_M with year fractions tau_1..tau_M,
/// tau_i spanning (T_{i-1}, T_i]. Times are year-denominated; valuation
/// time is 0, which may lie strictly before T_0 (the stub period).
///
/// "Year j" (j = 1..M) is the accrual interval of the piecewise-constant
/// volatility table: (T_{j-2}, T_{j-1}] with T_{-1} := 0. Forward F_i is
/// alive on [0, T_{i-1}], i.e. through years 1..i.
struct TenorStructure {
    std::vector<double> dates;     // T_0..T_M  (M+1 entries)
    std::vector<double> fractions; // tau_1..tau_M (M entries)

    std::size_t periods() const { return fractions.size(); }

    /// Fraction tau_0 of the stub period [0, T_0].
    double stub_fraction() const { return dates.front(); }

    double year_start(std::size_t year) const; // year in 1..M
    double year_end(std::size_t year) const;

    /// Builds the common annual structure T = {t0, t0+1, ..., t0+periods}.
    static TenorStructure annual(std::size_t periods, double t0 = 1.0);

    void validate() const;
};

/// Initial simply-compounded forward rates F_1(0)..F_M(0), one per period.
struct ForwardCurve {
    std::vector<double> forwards;

    double forward(std::size_t caplet) const { return forwards.at(caplet - 1); }
    void validate(std::size_t periods) const;
};

/// Lower-triangular piecewise-constant volatility table. rows[i-1] holds
/// sigma_{i,1}..sigma_{i,i}: the vol of F_i during year j. Entries are
/// annualized decimals and must be nonnegative (zero-vol configurations
/// are legal degenerate inputs throughout the engine).
struct VolSurface {
    std::vector<std::vector<double>> rows;

    double value(std::size_t caplet, std::size_t year) const;

    /// sigma_i(t): vol of F_i at time t < T_{i-1}.
    double at_time(std::size_t caplet, const TenorStructure& tenor, double t) const;

    /// Table whose row i repeats row_vols[i-1] (the common calibration
    /// assumption that each row is constant).
    static VolSurface constant_rows(const std::vector<double>& row_vols);

    void validate(std::size_t periods) const;
};

/// Zero-coupon bond prices p(0, T_0)..p(0, T_M).
struct DiscountCurve {
    std::vector<double> bonds;

    double bond(std::size_t date_index) const { return bonds.at(date_index); }
};

/// Cap contract: strike plus a contiguous caplet range (1-based indices
/// into the tenor structure; caplet i resets at T_{i-1} and pays at T_i).
struct CapSpec {
    double strike = 0.0;
    std::size_t first_caplet = 1;
    std::size_t last_caplet = 1;
    double notional = 1.0;

    std::size_t caplet_count() const { return last_caplet - first_caplet + 1; }
    void validate(std::size_t periods) const;
};

/// Calibrated model inputs: tenor, forwards, vol table, the stub spot
/// rate for [0, T_0], and an optional correlation matrix (identity when
/// absent; cap pricing never consumes it).
struct MarketDataset {
    TenorStructure tenor;
    ForwardCurve curve;
    VolSurface vols;
    double stub_rate = 0.0;
    std::optional<std::vector<std::vector<double>>> correlation;

    std::size_t periods() const { return tenor.periods(); }
    void validate() const;
};

/// p(0,T_i) = 1/(1 + tau_0 r_stub) * prod_{j<=i} 1/(1 + tau_j F_j(0)).
DiscountCurve bond_prices(const ForwardCurve& curve, const TenorStructure& tenor,
                          double stub_rate);

/// Total caplet volatility v_i with v_i^2 = integral_t^{T_{i-1}} sigma_i(s)^2 ds
/// under the piecewise-constant table. Throws std::domain_error once the
/// caplet has reset (t >= T_{i-1}).
double caplet_vol(const VolSurface& surface, const TenorStructure& tenor,
                  std::size_t caplet, double t = 0.0);

/// T_{i-1}-caplet volatility: sqrt(v_i^2 / T_{i-1}).
double normalized_caplet_vol(const VolSurface& surface, const TenorStructure& tenor,
                             std::size_t caplet);

/// Black-76 caplet price tau * p * [F Phi(d1) - K Phi(d2)] with total
/// volatility v; at v = 0 returns the intrinsic limit tau * p * (F-K)^+.
double black76_caplet(double forward, double strike, double total_vol,
                      double fraction, double discount);

/// Sum of Black-76 caplets over the cap's range, each with its own v_i and
/// p(0,T_i); scaled by the notional.
double black76_cap(const MarketDataset& dataset, const CapSpec& spec);

/// Drift mu_k^i of d F_k / F_k under the T_i-forward measure at time t:
/// -sum_{j=k+1}^{i} tau_j rho_{k,j} sigma_k sigma_j F_j / (1 + tau_j F_j)
/// for k < i, zero for k = i, and the mirrored positive sum for k > i.
/// `forwards` holds the current rate vector F_1..F_M; `rho` is the full
/// correlation matrix.
double drift_mu(std::size_t k, std::size_t i, const std::vector<double>& forwards,
                const VolSurface& surface, const TenorStructure& tenor,
                const std::vector<std::vector<double>>& rho, double t);

/// Identity correlation matrix of the given size.
std::vector<std::vector<double>> identity_correlation(std::size_t size);

/// Correlation matrix of the dataset (identity when not supplied).
std::vector<std::vector<double>> effective_correlation(const MarketDataset& dataset);

} // namespace caplmm::lmm
