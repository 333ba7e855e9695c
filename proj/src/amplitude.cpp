#include "caplmm/amplitude.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "caplmm/errors.hpp"

namespace caplmm::amp {

namespace {

using std::numbers::pi;

double lognormal_pdf(double x, double log_mean, double log_stdev) {
    if (x <= 0.0) return 0.0;
    const double z = (std::log(x) - log_mean) / log_stdev;
    return std::exp(-0.5 * z * z) / (x * log_stdev * std::sqrt(2.0 * pi));
}

// Multi-controlled gate matching the bit pattern `pattern` on `qubits`:
// zero bits are conjugated with X so every control fires on |1>.
void append_pattern_controlled(qsim::Circuit& circuit, const qsim::Gate& core,
                               const std::vector<unsigned>& qubits,
                               std::size_t pattern) {
    std::vector<unsigned> flips;
    for (std::size_t b = 0; b < qubits.size(); ++b)
        if (((pattern >> b) & 1) == 0) flips.push_back(qubits[b]);
    for (unsigned q : flips) circuit.append(qsim::Gate::x(q));
    circuit.append(core);
    for (unsigned q : flips) circuit.append(qsim::Gate::x(q));
}

} // namespace

double DiscretizedDistribution::spacing() const {
    return grid.size() > 1 ? grid[1] - grid[0] : 0.0;
}

DiscretizedDistribution discretize_lognormal(double log_mean, double log_stdev,
                                             unsigned qubits, double span,
                                             double floor_eps) {
    if (qubits < 1)
        throw std::invalid_argument("discretize_lognormal: need at least one qubit");
    if (log_stdev < 0.0)
        throw std::invalid_argument("discretize_lognormal: log_stdev must be nonnegative");
    if (span <= 0.0)
        throw std::invalid_argument("discretize_lognormal: span must be positive");

    DiscretizedDistribution dist;
    dist.qubits = qubits;
    dist.log_mean = log_mean;
    dist.log_stdev = log_stdev;
    const std::size_t points = std::size_t{1} << qubits;
    dist.grid.resize(points);
    dist.probs.assign(points, 0.0);

    if (log_stdev == 0.0) {
        // Degenerate atom: a token grid centered exactly on exp(log_mean)
        // carrying all the mass, so downstream payoffs stay exact.
        const double atom = std::exp(log_mean);
        const double h = std::max(atom, 1.0) * 1e-9;
        const std::size_t center = points / 2;
        for (std::size_t i = 0; i < points; ++i)
            dist.grid[i] = atom + (static_cast<double>(i) - static_cast<double>(center)) * h;
        dist.probs[center] = 1.0;
        return dist;
    }

    const double mean = std::exp(log_mean + 0.5 * log_stdev * log_stdev);
    const double sd = mean * std::sqrt(std::expm1(log_stdev * log_stdev));
    const double lo = std::max(floor_eps, mean - span * sd);
    const double hi = mean + span * sd;
    const double h = (hi - lo) / static_cast<double>(points - 1);

    double total = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        dist.grid[i] = lo + static_cast<double>(i) * h;
        dist.probs[i] = lognormal_pdf(dist.grid[i], log_mean, log_stdev);
        total += dist.probs[i];
    }
    if (total <= 0.0)
        throw std::invalid_argument("discretize_lognormal: grid carries no mass");
    for (double& p : dist.probs) p /= total;
    return dist;
}

PayoffEncoding make_payoff_encoding(const DiscretizedDistribution& dist,
                                    double strike, double c_approx) {
    if (!(c_approx > 0.0 && c_approx <= 0.5))
        throw std::invalid_argument("make_payoff_encoding: c_approx must lie in (0, 0.5]");

    PayoffEncoding encoding;
    encoding.c_approx = c_approx;
    encoding.threshold = dist.size();
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (dist.grid[i] >= strike) {
            encoding.threshold = i;
            break;
        }
    }
    if (encoding.all_below(dist.size())) return encoding; // zero-payoff short circuit

    encoding.scale = dist.grid.back() - strike;
    if (encoding.scale <= 0.0) {
        // x_max == K exactly: the only in-range point pays zero.
        encoding.threshold = dist.size();
        return encoding;
    }
    encoding.slope = 1.0 / encoding.scale;
    encoding.offset = -strike / encoding.scale;
    return encoding;
}

qsim::Circuit load_distribution(const DiscretizedDistribution& dist) {
    const unsigned n = dist.qubits;
    qsim::Circuit circuit(n);

    // Subtree masses, walked from the most significant qubit down.
    for (unsigned level = 0; level < n; ++level) {
        const unsigned qubit = n - 1 - level;
        const std::size_t block = std::size_t{1} << (n - level); // indices per prefix
        std::vector<unsigned> prefix_qubits;
        for (unsigned h = n - 1; h > qubit; --h) prefix_qubits.push_back(h);

        for (std::size_t prefix = 0; prefix < (std::size_t{1} << level); ++prefix) {
            const std::size_t first = prefix * block;
            double mass_left = 0.0, mass_right = 0.0;
            for (std::size_t i = first; i < first + block / 2; ++i)
                mass_left += dist.probs[i];
            for (std::size_t i = first + block / 2; i < first + block; ++i)
                mass_right += dist.probs[i];
            const double mass = mass_left + mass_right;
            if (mass <= 0.0 || mass_right <= 0.0) continue; // theta = 0
            const double theta =
                2.0 * std::atan2(std::sqrt(mass_right), std::sqrt(mass_left));

            // prefix bits map to prefix_qubits from msb down; bit b of the
            // pattern must correspond to prefix_qubits[b].
            std::size_t pattern = 0;
            for (std::size_t b = 0; b < prefix_qubits.size(); ++b) {
                const unsigned bit_of_prefix =
                    static_cast<unsigned>(level - 1 - b); // msb of prefix first
                if ((prefix >> bit_of_prefix) & 1) pattern |= std::size_t{1} << b;
            }
            qsim::Gate core = qsim::Gate::ry(theta, qubit, prefix_qubits);
            append_pattern_controlled(circuit, core, prefix_qubits, pattern);
        }
    }
    return circuit;
}

qsim::Circuit comparator(const DiscretizedDistribution& dist, double strike,
                         unsigned ancilla) {
    const unsigned n = dist.qubits;
    if (ancilla < n)
        throw std::invalid_argument("comparator: ancilla must sit above the register");
    qsim::Circuit circuit(ancilla + 1);

    std::size_t threshold = dist.size();
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (dist.grid[i] >= strike) {
            threshold = i;
            break;
        }
    }

    // Cover [threshold, 2^n) with aligned dyadic blocks; each block fixes a
    // high-bit prefix, one multi-controlled X per block.
    std::size_t lo = threshold;
    const std::size_t end = dist.size();
    while (lo < end) {
        std::size_t size = 1;
        while (lo % (size * 2) == 0 && lo + size * 2 <= end) size *= 2;
        unsigned free_bits = 0;
        while ((std::size_t{1} << free_bits) < size) ++free_bits;

        std::vector<unsigned> controls;
        std::size_t pattern = 0;
        for (unsigned b = free_bits; b < n; ++b) {
            controls.push_back(b);
            if ((lo >> b) & 1) pattern |= std::size_t{1} << (controls.size() - 1);
        }
        qsim::Gate core = qsim::Gate::x(ancilla, controls);
        append_pattern_controlled(circuit, core, controls, pattern);
        lo += size;
    }
    return circuit;
}

qsim::Circuit payoff_rotation(const DiscretizedDistribution& dist, double strike,
                              const PayoffEncoding& encoding, unsigned ancilla,
                              unsigned objective) {
    const unsigned n = dist.qubits;
    if (objective <= ancilla || ancilla < n)
        throw std::invalid_argument("payoff_rotation: want register < ancilla < objective");
    qsim::Circuit circuit(objective + 1);
    // Zero-payoff short circuit: nothing above the strike, objective stays |0>.
    if (encoding.all_below(dist.size()) || dist.grid.back() <= strike) return circuit;

    const double c = encoding.c_approx;

    // Ancilla clear: encode f = 0.
    circuit.append(qsim::Gate::x(ancilla));
    circuit.append(qsim::Gate::ry(2.0 * (pi / 4.0 - c), objective, {ancilla}));
    circuit.append(qsim::Gate::x(ancilla));

    // Ancilla set: angle linear in the grid index i,
    //   c*(2 f(x_i) - 1) + pi/4 = A + B*i.
    const double f0 = encoding.slope * dist.grid.front() + encoding.offset;
    const double a_term = c * (2.0 * f0 - 1.0) + pi / 4.0;
    const double b_term = 2.0 * c * encoding.slope * dist.spacing();
    circuit.append(qsim::Gate::ry(2.0 * a_term, objective, {ancilla}));
    for (unsigned b = 0; b < n; ++b) {
        const double weight = static_cast<double>(std::size_t{1} << b);
        circuit.append(qsim::Gate::ry(2.0 * b_term * weight, objective, {ancilla, b}));
    }
    return circuit;
}

qsim::AmplitudeOperator build_caplet_problem(const DiscretizedDistribution& dist,
                                             double strike,
                                             const PayoffEncoding& encoding) {
    const unsigned n = dist.qubits;
    const unsigned ancilla = n;
    const unsigned objective = n + 1;
    qsim::Circuit prep(objective + 1);
    prep.append(load_distribution(dist));
    prep.append(comparator(dist, strike, ancilla));
    prep.append(payoff_rotation(dist, strike, encoding, ancilla, objective));
    return qsim::AmplitudeOperator{std::move(prep), objective};
}

namespace {

struct HalfPlaneFit {
    unsigned long long k = 0;
    bool upper = true;
    bool advanced = false;
};

// Largest odd K' = 2k'+1 with K' >= r*(2k+1) such that [K' w_lo, K' w_hi]
// stays inside one half-plane of the circle (multiples of pi).
HalfPlaneFit find_next_k(unsigned long long k, double omega_lo, double omega_hi,
                         unsigned long long ratio = 2) {
    HalfPlaneFit fit;
    fit.k = k;
    const double width = omega_hi - omega_lo;
    if (width <= 0.0) return fit;
    const double k_max_real = pi / width;
    if (k_max_real > 1e17) return fit; // interval already point-like
    unsigned long long cand = static_cast<unsigned long long>(k_max_real);
    if (cand % 2 == 0) --cand;
    const unsigned long long current = 2 * k + 1;
    while (cand >= ratio * current && cand >= 3) {
        const double lo = static_cast<double>(cand) * omega_lo;
        const double hi = static_cast<double>(cand) * omega_hi;
        const double plane_lo = std::floor(lo / pi);
        const double plane_hi = std::floor(hi / pi);
        if (plane_lo == plane_hi) {
            fit.k = (cand - 1) / 2;
            fit.upper = (static_cast<long long>(plane_lo) % 2) == 0;
            fit.advanced = true;
            return fit;
        }
        cand -= 2;
    }
    return fit;
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

double a_from_omega(double omega) {
    const double s = std::sin(0.5 * omega);
    return s * s;
}

} // namespace

QaeResult iqae(const qsim::AmplitudeOperator& problem, const IqaeOptions& options,
               RngStream* rng) {
    if (!(options.epsilon > 0.0 && options.epsilon < 0.5))
        throw std::invalid_argument("iqae: epsilon must lie in (0, 0.5)");
    if (!(options.alpha > 0.0 && options.alpha < 1.0))
        throw std::invalid_argument("iqae: alpha must lie in (0, 1)");

    qsim::StateVector state(problem.num_qubits());
    qsim::run_circuit(problem.prep, state);

    if (options.mode == QaeMode::exact) {
        // The probability is read exactly: one k = 0 round pins the angle.
        const double a = clamp01(probability_of_one(state, problem.objective));
        return QaeResult{a, a, a, 1, 0, 1};
    }
    if (rng == nullptr)
        throw std::invalid_argument("iqae: shots mode requires an RngStream");

    double omega_lo = 0.0;
    double omega_hi = pi;
    unsigned long long k = 0;
    bool upper = true;
    std::uint64_t ones_at_k = 0, shots_at_k = 0;
    QaeResult result;

    // Union-bound budget for the Chernoff-Hoeffding slack: at most this many
    // distinct powers can occur before the interval is resolved.
    const double ci_rounds =
        std::max(1.0, std::ceil(std::log2(pi / (4.0 * options.epsilon))));

    while (0.5 * (a_from_omega(omega_hi) - a_from_omega(omega_lo)) > options.epsilon) {
        if (result.rounds >= options.max_rounds)
            throw estimation_error("iqae: exceeded maximum rounds",
                                   a_from_omega(omega_lo), a_from_omega(omega_hi),
                                   result.oracle_calls);
        ++result.rounds;

        const HalfPlaneFit fit = find_next_k(k, omega_lo, omega_hi);
        if (fit.advanced) {
            const unsigned long long steps = fit.k - k;
            qsim::grover_power(problem, static_cast<unsigned>(steps), state);
            k = fit.k;
            upper = fit.upper;
            ones_at_k = 0;
            shots_at_k = 0;
        }

        const std::uint64_t shots = options.shots_per_round;
        ones_at_k += qsim::sample_measurements(state, problem.objective, shots, *rng);
        shots_at_k += shots;
        result.oracle_calls += 2 * k + 1;
        result.total_shots += shots;

        const double p_hat =
            static_cast<double>(ones_at_k) / static_cast<double>(shots_at_k);
        const double slack =
            std::sqrt(std::log(2.0 * ci_rounds / options.alpha) /
                      (2.0 * static_cast<double>(shots_at_k)));
        const double p_lo = clamp01(p_hat - slack);
        const double p_hi = clamp01(p_hat + slack);

        // P(1) = (1 - cos((2k+1) omega)) / 2; invert on the known half-plane.
        const double big_k = static_cast<double>(2 * k + 1);
        double phi_lo, phi_hi;
        if (upper) {
            phi_lo = std::acos(std::clamp(1.0 - 2.0 * p_lo, -1.0, 1.0));
            phi_hi = std::acos(std::clamp(1.0 - 2.0 * p_hi, -1.0, 1.0));
        } else {
            phi_lo = 2.0 * pi - std::acos(std::clamp(1.0 - 2.0 * p_hi, -1.0, 1.0));
            phi_hi = 2.0 * pi - std::acos(std::clamp(1.0 - 2.0 * p_lo, -1.0, 1.0));
        }

        // Both the scaled prior midpoint and the measured angle live in the
        // same half-plane, so the even-pi base is recovered by rounding.
        const double mid = 0.5 * big_k * (omega_lo + omega_hi);
        const double phi_mid = 0.5 * (phi_lo + phi_hi);
        const double base = 2.0 * pi * std::round((mid - phi_mid) / (2.0 * pi));

        omega_lo = std::max(omega_lo, (base + phi_lo) / big_k);
        omega_hi = std::min(omega_hi, (base + phi_hi) / big_k);
        if (omega_hi < omega_lo) omega_hi = omega_lo;
    }

    result.lower = a_from_omega(omega_lo);
    result.upper = a_from_omega(omega_hi);
    result.estimate = 0.5 * (result.lower + result.upper);
    return result;
}

double qae_error_bound(double oracle_calls) {
    if (oracle_calls < 1.0)
        throw std::invalid_argument("qae_error_bound: need M >= 1");
    return pi / oracle_calls + pi * pi / (oracle_calls * oracle_calls);
}

mc::PriceEstimate postprocess_payoff(const QaeResult& result,
                                     const PayoffEncoding& encoding,
                                     const DiscretizedDistribution& dist,
                                     double strike, double fraction, double discount,
                                     mc::Method method) {
    mc::PriceEstimate estimate;
    estimate.method = method;
    estimate.n_samples = result.oracle_calls;
    // Payoff identically zero when nothing on the grid clears the strike.
    if (encoding.all_below(dist.size()) || dist.grid.back() <= strike) return estimate;

    const double c = encoding.c_approx;
    // a = E[sin^2(c(2f-1) + pi/4)] = (1 + E[sin(2c(2f-1))]) / 2, so
    // f ~= (asin(2a-1)/(2c) + 1) / 2; exact for point distributions.
    const auto invert = [&](double a) {
        const double s = std::clamp(2.0 * a - 1.0, -1.0, 1.0);
        const double u = std::clamp(std::asin(s) / (2.0 * c), -1.0, 1.0);
        return 0.5 * (u + 1.0) * encoding.scale;
    };
    estimate.value = fraction * discount * invert(result.estimate);
    estimate.std_error =
        0.5 * fraction * discount * (invert(result.upper) - invert(result.lower));
    return estimate;
}

double discretized_expected_payoff(const DiscretizedDistribution& dist, double strike) {
    double total = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i)
        total += dist.probs[i] * std::max(dist.grid[i] - strike, 0.0);
    return total;
}

} // namespace caplmm::amp
