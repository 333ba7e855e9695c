#include "caplmm/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace caplmm::qsim {

namespace {

void check_qubit(unsigned qubit, unsigned num_qubits, const char* what) {
    if (qubit >= num_qubits)
        throw std::out_of_range(std::string(what) + ": qubit index out of range");
}

std::size_t control_mask(const Gate& gate, unsigned num_qubits) {
    std::size_t mask = 0;
    for (unsigned c : gate.controls) {
        check_qubit(c, num_qubits, "apply_gate control");
        if (c == gate.target)
            throw std::invalid_argument("apply_gate: control equals target");
        mask |= std::size_t{1} << c;
    }
    return mask;
}

} // namespace

StateVector::StateVector(unsigned num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits < 1)
        throw std::invalid_argument("StateVector: need at least one qubit");
    if (num_qubits > 30)
        throw std::invalid_argument("StateVector: register too large");
    amplitudes_.assign(std::size_t{1} << num_qubits, Amplitude{0.0, 0.0});
    amplitudes_[0] = Amplitude{1.0, 0.0};
}

StateVector StateVector::from_amplitudes(std::vector<Amplitude> amplitudes) {
    unsigned n = 0;
    while ((std::size_t{1} << n) < amplitudes.size()) ++n;
    if ((std::size_t{1} << n) != amplitudes.size() || amplitudes.size() < 2)
        throw std::invalid_argument("StateVector: amplitude count must be 2^n, n >= 1");
    StateVector state(n);
    state.amplitudes_ = std::move(amplitudes);
    if (std::fabs(state.norm_sq() - 1.0) > 1e-10)
        throw std::invalid_argument("StateVector: amplitudes are not unit norm");
    return state;
}

double StateVector::norm_sq() const {
    double total = 0.0;
    for (const Amplitude& a : amplitudes_) total += std::norm(a);
    return total;
}

Gate Gate::x(unsigned target, std::vector<unsigned> controls) {
    Gate g;
    g.kind = Kind::pauli_x;
    g.target = target;
    g.controls = std::move(controls);
    return g;
}

Gate Gate::ry(double theta, unsigned target, std::vector<unsigned> controls) {
    Gate g;
    g.kind = Kind::ry;
    g.theta = theta;
    g.target = target;
    g.controls = std::move(controls);
    return g;
}

Gate Gate::inverse() const {
    Gate g = *this;
    if (g.kind == Kind::ry) g.theta = -g.theta;
    return g;
}

void Circuit::append(const Circuit& other) {
    if (other.num_qubits > num_qubits)
        throw std::invalid_argument("Circuit::append: fragment is wider than circuit");
    gates.insert(gates.end(), other.gates.begin(), other.gates.end());
}

Circuit Circuit::inverse() const {
    Circuit inv(num_qubits);
    inv.gates.reserve(gates.size());
    for (auto it = gates.rbegin(); it != gates.rend(); ++it)
        inv.gates.push_back(it->inverse());
    return inv;
}

void apply_gate(StateVector& state, const Gate& gate) {
    const unsigned n = state.num_qubits();
    check_qubit(gate.target, n, "apply_gate target");
    const std::size_t ctrl = control_mask(gate, n);
    const std::size_t bit = std::size_t{1} << gate.target;
    const std::size_t dim = state.dim();

    if (gate.kind == Gate::Kind::pauli_x) {
        for (std::size_t i = 0; i < dim; ++i) {
            if ((i & bit) == 0 && (i & ctrl) == ctrl) {
                std::swap(state.amp(i), state.amp(i | bit));
            }
        }
        return;
    }

    const double c = std::cos(0.5 * gate.theta);
    const double s = std::sin(0.5 * gate.theta);
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & bit) == 0 && (i & ctrl) == ctrl) {
            const Amplitude a0 = state.amp(i);
            const Amplitude a1 = state.amp(i | bit);
            state.amp(i) = c * a0 - s * a1;
            state.amp(i | bit) = s * a0 + c * a1;
        }
    }
}

void run_circuit(const Circuit& circuit, StateVector& state) {
    if (circuit.num_qubits > state.num_qubits())
        throw std::invalid_argument("run_circuit: circuit wider than state");
    for (const Gate& gate : circuit.gates) apply_gate(state, gate);
}

double probability_of_one(const StateVector& state, unsigned qubit) {
    check_qubit(qubit, state.num_qubits(), "probability_of_one");
    const std::size_t bit = std::size_t{1} << qubit;
    double p = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i)
        if (i & bit) p += std::norm(state.amp(i));
    return p;
}

void grover_power(const AmplitudeOperator& op, unsigned k, StateVector& state) {
    if (op.prep.num_qubits != state.num_qubits())
        throw std::invalid_argument("grover_power: operator/state width mismatch");
    check_qubit(op.objective, state.num_qubits(), "grover_power objective");

    const Circuit inverse_prep = op.prep.inverse();
    const std::size_t obj_bit = std::size_t{1} << op.objective;

    for (unsigned step = 0; step < k; ++step) {
        // S_chi: negate objective-one components.
        for (std::size_t i = 0; i < state.dim(); ++i)
            if (i & obj_bit) state.amp(i) = -state.amp(i);
        run_circuit(inverse_prep, state);
        // S_0: negate the all-zeros component.
        state.amp(0) = -state.amp(0);
        run_circuit(op.prep, state);
        for (std::size_t i = 0; i < state.dim(); ++i) state.amp(i) = -state.amp(i);
    }
}

std::uint64_t sample_measurements(const StateVector& state, unsigned qubit,
                                  std::uint64_t shots, RngStream& rng) {
    if (shots < 1) throw std::invalid_argument("sample_measurements: shots must be >= 1");
    const double p = probability_of_one(state, qubit);
    std::uint64_t ones = 0;
    for (std::uint64_t s = 0; s < shots; ++s)
        if (rng.next_uniform() < p) ++ones;
    return ones;
}

} // namespace caplmm::qsim
