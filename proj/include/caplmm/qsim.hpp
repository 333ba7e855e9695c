#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "caplmm/rng.hpp"

namespace caplmm::qsim {

using Amplitude = std::complex<double>;

/// Exact statevector over n qubits. Qubit ordering is little-endian:
/// qubit 0 is the least significant bit of the basis index.
class StateVector {
public:
    explicit StateVector(unsigned num_qubits);

    /// Adopts an amplitude array; throws unless the norm is 1 within 1e-10.
    static StateVector from_amplitudes(std::vector<Amplitude> amplitudes);

    unsigned num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amplitudes_.size(); }

    Amplitude& amp(std::size_t basis) { return amplitudes_[basis]; }
    const Amplitude& amp(std::size_t basis) const { return amplitudes_[basis]; }
    std::span<const Amplitude> amplitudes() const { return amplitudes_; }

    double norm_sq() const;

private:
    unsigned num_qubits_;
    std::vector<Amplitude> amplitudes_;
};

/// Gate set: X and RY(theta), optionally with any number of controls
/// (a control fires on |1>; conjugate with X for a |0> control).
struct Gate {
    enum class Kind { pauli_x, ry };

    Kind kind = Kind::pauli_x;
    double theta = 0.0;
    unsigned target = 0;
    std::vector<unsigned> controls;

    static Gate x(unsigned target, std::vector<unsigned> controls = {});
    static Gate ry(double theta, unsigned target, std::vector<unsigned> controls = {});

    Gate inverse() const;
};

struct Circuit {
    unsigned num_qubits = 0;
    std::vector<Gate> gates;

    explicit Circuit(unsigned n = 0) : num_qubits(n) {}

    void append(Gate gate) { gates.push_back(std::move(gate)); }
    void append(const Circuit& other);
    Circuit inverse() const;
};

/// State-preparation operator A with a designated objective qubit whose
/// one-probability is the amplitude being estimated.
struct AmplitudeOperator {
    Circuit prep;
    unsigned objective = 0;

    unsigned num_qubits() const { return prep.num_qubits; }
};

void apply_gate(StateVector& state, const Gate& gate);

void run_circuit(const Circuit& circuit, StateVector& state);

double probability_of_one(const StateVector& state, unsigned qubit);

/// Applies Q^k in place with Q = -A S_0 Adag S_chi: S_chi negates
/// objective-one components, S_0 negates the |0...0> component.
void grover_power(const AmplitudeOperator& op, unsigned k, StateVector& state);

/// Binomially samples `shots` measurements of the qubit; returns the count
/// of ones.
std::uint64_t sample_measurements(const StateVector& state, unsigned qubit,
                                  std::uint64_t shots, RngStream& rng);

} // namespace caplmm::qsim
