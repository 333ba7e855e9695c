#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "caplmm/dataset.hpp"
#include "caplmm/pricers.hpp"

namespace caplmm::io {

/// Everything needed to replay an experiment byte-for-byte. Serialized
/// verbatim (canonical JSON, sorted keys) into the first line of every
/// artifact the run emits.
struct RunConfig {
    std::string dataset_path;
    std::vector<std::string> methods = {"classical"};
    std::vector<std::uint64_t> path_grid = {10'000};
    unsigned qubits_per_year = 3;
    double epsilon = 1e-3;
    double alpha = 0.05;
    unsigned trials = 1;
    std::uint64_t seed = 0;
    std::string mode = "exact"; // exact | shots
    unsigned shots_per_round = 128;
    double c_approx = 0.05;
    unsigned threads = 1;
    std::string out_dir = "out";
    bool plot = false;
};

std::string run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const std::string& text);

/// Reads the embedded "# runconfig: {...}" line of an emitted artifact.
RunConfig run_config_from_artifact(const std::filesystem::path& artifact);

pricers::MethodConfig method_config_from_run(const RunConfig& config);

/// Executes the configured experiment and writes the artifacts:
///   price_summary.csv   per-method price table (analytic row included)
///   convergence.csv     method,M,trial,estimate,abs_error
///   qubit_table.csv     per-(n,T) register breakdown
///   convergence.svg     optional log-log error plot
/// Numbers carry 17 significant digits; reruns are byte-identical.
/// Returns 0 on success.
int run(const RunConfig& config);

/// Fixed-format number serialization used by all artifacts (17 significant
/// digits, round-trip exact).
std::string format_number(double value);

void write_convergence_csv(const std::filesystem::path& path, const RunConfig& config,
                           const std::vector<pricers::ConvergenceRecord>& records);

void write_price_summary(const std::filesystem::path& path, const RunConfig& config,
                         const std::vector<mc::PriceEstimate>& estimates);

void write_qubit_table(const std::filesystem::path& path, const RunConfig& config,
                       const std::vector<std::uint64_t>& n_range,
                       const std::vector<std::uint64_t>& t_range);

void write_convergence_svg(const std::filesystem::path& path,
                           const std::vector<pricers::ConvergenceRecord>& records);

} // namespace caplmm::io
