#include "caplmm/stats.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace caplmm {

double norm_pdf(double x) {
    static const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double norm_cdf(double x) {
    return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

namespace {

// PPND16 coefficients (Wichura, Algorithm AS 241).
constexpr double kA[8] = {
    3.3871328727963666080e0,  1.3314166789178437745e2,
    1.9715909503065514427e3,  1.3731693765509461125e4,
    4.5921953931549871457e4,  6.7265770927008700853e4,
    3.3430575583588128105e4,  2.5090809287301226727e3};
constexpr double kB[8] = {
    1.0,                      4.2313330701600911252e1,
    6.8718700749205790830e2,  5.3941960214247511077e3,
    2.1213794301586595867e4,  3.9307895800092710610e4,
    2.8729085735721942674e4,  5.2264952788528545610e3};
constexpr double kC[8] = {
    1.42343711074968357734e0, 4.63033784615654529590e0,
    5.76949722146069140550e0, 3.64784832476320460504e0,
    1.27045825245236838258e0, 2.41780725177450611770e-1,
    2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr double kD[8] = {
    1.0,                      2.05319162663775882187e0,
    1.67638483018380384940e0, 6.89767334985100004550e-1,
    1.48103976427480074590e-1, 1.51986665636164571966e-2,
    5.47593808499534494600e-4, 1.05075007164441684324e-9};
constexpr double kE[8] = {
    6.65790464350110377720e0, 5.46378491116411436990e0,
    1.78482653991729133580e0, 2.96560571828504891230e-1,
    2.65321895265761230930e-2, 1.24266094738807843860e-3,
    2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr double kF[8] = {
    1.0,                      5.99832206555887937690e-1,
    1.36929880922735805310e-1, 1.48753612908506148525e-2,
    7.86869131145613259100e-4, 1.84631831751005468180e-5,
    1.42151175831644588870e-7, 2.04426310338993978564e-15};

double poly(const double (&c)[8], double x) {
    double r = c[7];
    for (int i = 6; i >= 0; --i) r = r * x + c[i];
    return r;
}

} // namespace

double norm_inv_cdf(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("norm_inv_cdf: p must lie strictly in (0, 1)");

    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * poly(kA, r) / poly(kB, r);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = poly(kC, r) / poly(kD, r);
    } else {
        r -= 5.0;
        value = poly(kE, r) / poly(kF, r);
    }
    return (q < 0.0) ? -value : value;
}

double SampleSummary::std_error() const {
    return count > 0 ? stdev / std::sqrt(static_cast<double>(count)) : 0.0;
}

SampleSummary summarize(std::span<const double> sample) {
    SampleSummary s;
    s.count = sample.size();
    if (sample.empty()) return s;

    bool constant = true;
    for (double v : sample)
        if (v != sample.front()) {
            constant = false;
            break;
        }
    if (constant) { // exact: constant samples have zero dispersion
        s.mean = sample.front();
        return s;
    }

    double sum = 0.0;
    for (double v : sample) sum += v;
    s.mean = sum / static_cast<double>(sample.size());
    if (sample.size() > 1) {
        double ss = 0.0;
        for (double v : sample) {
            const double d = v - s.mean;
            ss += d * d;
        }
        s.stdev = std::sqrt(ss / static_cast<double>(sample.size() - 1));
    }
    return s;
}

double regression_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("regression_slope: need two samples of equal size >= 2");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0)
        throw std::invalid_argument("regression_slope: degenerate abscissa");
    return sxy / sxx;
}

} // namespace caplmm
