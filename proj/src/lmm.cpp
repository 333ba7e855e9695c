#include "caplmm/lmm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "caplmm/stats.hpp"

namespace caplmm::lmm {

namespace {

// Hot paths call this; keep the failure message static so the check is a
// plain branch with no allocation.
inline void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

} // namespace

double TenorStructure::year_start(std::size_t year) const {
    require(year >= 1 && year <= periods(), "TenorStructure: year out of range");
    return year == 1 ? 0.0 : dates[year - 2];
}

double TenorStructure::year_end(std::size_t year) const {
    require(year >= 1 && year <= periods(), "TenorStructure: year out of range");
    return dates[year - 1];
}

TenorStructure TenorStructure::annual(std::size_t periods, double t0) {
    TenorStructure tenor;
    tenor.dates.resize(periods + 1);
    tenor.fractions.assign(periods, 1.0);
    for (std::size_t i = 0; i <= periods; ++i)
        tenor.dates[i] = t0 + static_cast<double>(i);
    return tenor;
}

void TenorStructure::validate() const {
    require(dates.size() >= 2, "TenorStructure: need at least T_0 and T_1");
    require(fractions.size() + 1 == dates.size(),
            "TenorStructure: fractions must have one entry per period");
    require(dates.front() >= 0.0, "TenorStructure: T_0 must be nonnegative");
    for (std::size_t i = 1; i < dates.size(); ++i)
        require(dates[i] > dates[i - 1], "TenorStructure: dates must be strictly increasing");
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        require(fractions[i] > 0.0, "TenorStructure: fractions must be positive");
        if (std::fabs(fractions[i] - (dates[i + 1] - dates[i])) > 1e-12)
            throw std::invalid_argument("TenorStructure: fraction " +
                                        std::to_string(i + 1) +
                                        " inconsistent with date difference");
    }
}

void ForwardCurve::validate(std::size_t periods) const {
    require(forwards.size() == periods,
            "ForwardCurve: expected one forward per tenor period");
    for (double f : forwards)
        require(f > 0.0, "ForwardCurve: forwards must be positive");
}

double VolSurface::value(std::size_t caplet, std::size_t year) const {
    require(caplet >= 1 && caplet <= rows.size(), "VolSurface: caplet out of range");
    const auto& row = rows[caplet - 1];
    require(year >= 1 && year <= row.size(), "VolSurface: year out of range");
    return row[year - 1];
}

double VolSurface::at_time(std::size_t caplet, const TenorStructure& tenor,
                           double t) const {
    require(caplet >= 1 && caplet <= rows.size(), "VolSurface: caplet out of range");
    require(t < tenor.dates[caplet - 1], "VolSurface: forward already reset");
    for (std::size_t year = 1; year <= caplet; ++year) {
        if (t < tenor.year_end(year)) return value(caplet, year);
    }
    return value(caplet, caplet); // unreachable for t < T_{i-1}
}

VolSurface VolSurface::constant_rows(const std::vector<double>& row_vols) {
    VolSurface surface;
    surface.rows.reserve(row_vols.size());
    for (std::size_t i = 0; i < row_vols.size(); ++i)
        surface.rows.emplace_back(i + 1, row_vols[i]);
    return surface;
}

void VolSurface::validate(std::size_t periods) const {
    require(rows.size() == periods, "VolSurface: expected one row per tenor period");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != i + 1)
            throw std::invalid_argument("VolSurface: row " + std::to_string(i + 1) +
                                        " must have " + std::to_string(i + 1) +
                                        " entries");
        for (double v : rows[i])
            require(v >= 0.0, "VolSurface: volatilities must be nonnegative");
    }
}

void CapSpec::validate(std::size_t periods) const {
    require(strike > 0.0, "CapSpec: strike must be positive");
    require(notional > 0.0, "CapSpec: notional must be positive");
    require(first_caplet >= 1 && first_caplet <= last_caplet && last_caplet <= periods,
            "CapSpec: caplet range must be nonempty and within the tenor structure");
}

void MarketDataset::validate() const {
    tenor.validate();
    curve.validate(tenor.periods());
    vols.validate(tenor.periods());
    require(stub_rate >= 0.0, "MarketDataset: stub rate must be nonnegative");
    if (correlation) {
        const auto& rho = *correlation;
        require(rho.size() == tenor.periods(),
                "MarketDataset: correlation must be MxM for M periods");
        for (std::size_t i = 0; i < rho.size(); ++i) {
            require(rho[i].size() == rho.size(), "MarketDataset: correlation must be square");
            require(std::fabs(rho[i][i] - 1.0) <= 1e-12,
                    "MarketDataset: correlation diagonal must be 1");
            for (std::size_t j = 0; j < rho.size(); ++j)
                require(std::fabs(rho[i][j] - rho[j][i]) <= 1e-12,
                        "MarketDataset: correlation must be symmetric");
        }
    }
}

DiscountCurve bond_prices(const ForwardCurve& curve, const TenorStructure& tenor,
                          double stub_rate) {
    tenor.validate();
    curve.validate(tenor.periods());
    require(stub_rate >= 0.0, "bond_prices: stub rate must be nonnegative");

    DiscountCurve discount;
    discount.bonds.resize(tenor.dates.size());
    discount.bonds[0] = 1.0 / (1.0 + tenor.stub_fraction() * stub_rate);
    for (std::size_t i = 1; i < tenor.dates.size(); ++i) {
        discount.bonds[i] =
            discount.bonds[i - 1] / (1.0 + tenor.fractions[i - 1] * curve.forwards[i - 1]);
    }
    return discount;
}

double caplet_vol(const VolSurface& surface, const TenorStructure& tenor,
                  std::size_t caplet, double t) {
    require(caplet >= 1 && caplet <= tenor.periods(), "caplet_vol: caplet out of range");
    const double reset = tenor.dates[caplet - 1];
    if (t >= reset)
        throw std::domain_error("caplet_vol: caplet " + std::to_string(caplet) +
                                " already reset at t = " + std::to_string(t));

    double variance = 0.0;
    for (std::size_t year = 1; year <= caplet; ++year) {
        const double lo = std::max(t, tenor.year_start(year));
        const double hi = std::min(reset, tenor.year_end(year));
        if (hi > lo) {
            const double sigma = surface.value(caplet, year);
            variance += sigma * sigma * (hi - lo);
        }
    }
    return std::sqrt(variance);
}

double normalized_caplet_vol(const VolSurface& surface, const TenorStructure& tenor,
                             std::size_t caplet) {
    const double reset = tenor.dates.at(caplet - 1);
    if (reset <= 0.0)
        throw std::domain_error("normalized_caplet_vol: zero horizon T_{i-1}");
    const double v = caplet_vol(surface, tenor, caplet, 0.0);
    return std::sqrt(v * v / reset);
}

double black76_caplet(double forward, double strike, double total_vol,
                      double fraction, double discount) {
    require(total_vol >= 0.0, "black76_caplet: total volatility must be nonnegative");
    require(fraction > 0.0, "black76_caplet: fraction must be positive");
    require(discount > 0.0, "black76_caplet: discount must be positive");

    if (total_vol == 0.0)
        return fraction * discount * std::max(forward - strike, 0.0);

    if (forward <= 0.0 || strike <= 0.0)
        throw std::domain_error("black76_caplet: F and K must be positive when v > 0");

    const double d1 = (std::log(forward / strike) + 0.5 * total_vol * total_vol) / total_vol;
    const double d2 = d1 - total_vol;
    return fraction * discount * (forward * norm_cdf(d1) - strike * norm_cdf(d2));
}

double black76_cap(const MarketDataset& dataset, const CapSpec& spec) {
    dataset.validate();
    spec.validate(dataset.periods());

    const DiscountCurve discount =
        bond_prices(dataset.curve, dataset.tenor, dataset.stub_rate);
    double price = 0.0;
    for (std::size_t i = spec.first_caplet; i <= spec.last_caplet; ++i) {
        const double v = caplet_vol(dataset.vols, dataset.tenor, i, 0.0);
        price += black76_caplet(dataset.curve.forward(i), spec.strike, v,
                                dataset.tenor.fractions[i - 1], discount.bond(i));
    }
    return spec.notional * price;
}

double drift_mu(std::size_t k, std::size_t i, const std::vector<double>& forwards,
                const VolSurface& surface, const TenorStructure& tenor,
                const std::vector<std::vector<double>>& rho, double t) {
    const std::size_t periods = tenor.periods();
    require(k >= 1 && k <= periods && i >= 1 && i <= periods,
            "drift_mu: rate/measure indices out of range");
    require(forwards.size() == periods, "drift_mu: forward vector size mismatch");
    require(rho.size() == periods, "drift_mu: correlation size mismatch");

    if (k == i) return 0.0;

    const double sigma_k = surface.at_time(k, tenor, t);
    const std::size_t lo = std::min(k, i) + 1;
    const std::size_t hi = std::max(k, i);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) {
        const double tau_j = tenor.fractions[j - 1];
        const double f_j = forwards[j - 1];
        const double sigma_j = surface.at_time(j, tenor, t);
        sum += tau_j * rho[k - 1][j - 1] * sigma_k * sigma_j * f_j / (1.0 + tau_j * f_j);
    }
    return (k < i) ? -sum : sum;
}

std::vector<std::vector<double>> identity_correlation(std::size_t size) {
    std::vector<std::vector<double>> rho(size, std::vector<double>(size, 0.0));
    for (std::size_t i = 0; i < size; ++i) rho[i][i] = 1.0;
    return rho;
}

std::vector<std::vector<double>> effective_correlation(const MarketDataset& dataset) {
    return dataset.correlation ? *dataset.correlation
                               : identity_correlation(dataset.periods());
}

} // namespace caplmm::lmm
