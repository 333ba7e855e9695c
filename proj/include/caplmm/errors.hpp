#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace caplmm {

/// Statevector register would exceed the configured memory budget.
class capacity_error : public std::runtime_error {
public:
    capacity_error(std::string what, std::size_t required_qubits)
        : std::runtime_error(std::move(what)), required_qubits_(required_qubits) {}

    std::size_t required_qubits() const noexcept { return required_qubits_; }

private:
    std::size_t required_qubits_;
};

/// Amplitude estimation failed to converge; carries the partial interval.
class estimation_error : public std::runtime_error {
public:
    estimation_error(std::string what, double lower, double upper,
                     std::uint64_t oracle_calls)
        : std::runtime_error(std::move(what)),
          lower_(lower), upper_(upper), oracle_calls_(oracle_calls) {}

    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }
    std::uint64_t oracle_calls() const noexcept { return oracle_calls_; }

private:
    double lower_;
    double upper_;
    std::uint64_t oracle_calls_;
};

/// Dataset file could not be parsed or violates a model invariant.
class dataset_error : public std::runtime_error {
public:
    dataset_error(std::string what, std::string field = {})
        : std::runtime_error(std::move(what)), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace caplmm
