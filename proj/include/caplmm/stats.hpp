#pragma once

#include <cstddef>
#include <span>

namespace caplmm {

/// Standard normal density.
double norm_pdf(double x);

/// Standard normal CDF, erfc-based; absolute error below 1e-14.
double norm_cdf(double x);

/// Inverse standard normal CDF (Wichura's PPND16 rational approximation).
/// Requires p in (0, 1).
double norm_inv_cdf(double p);

/// Mean and unbiased sample standard deviation of a sample.
struct SampleSummary {
    double mean = 0.0;
    double stdev = 0.0;       // unbiased (n-1) sample standard deviation
    std::size_t count = 0;

    double std_error() const; // stdev / sqrt(count)
};

/// Welford accumulator with Chan's pairwise combination. Constant samples
/// give an exactly zero second moment (no cancellation), which the
/// deterministic zero-volatility limits rely on.
struct RunningMoments {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        count += 1.0;
        const double delta = x - mean;
        mean += delta / count;
        m2 += delta * (x - mean);
    }

    void combine(const RunningMoments& other) {
        if (other.count == 0.0) return;
        if (count == 0.0) {
            *this = other;
            return;
        }
        const double total = count + other.count;
        const double delta = other.mean - mean;
        mean += delta * other.count / total;
        m2 += other.m2 + delta * delta * count * other.count / total;
        count = total;
    }

    double sample_variance() const { return count > 1.0 ? m2 / (count - 1.0) : 0.0; }
    double mean_variance() const {
        return count > 1.0 ? sample_variance() / count : 0.0;
    }
};

SampleSummary summarize(std::span<const double> sample);

/// Least-squares slope of y against x.
double regression_slope(std::span<const double> x, std::span<const double> y);

} // namespace caplmm
