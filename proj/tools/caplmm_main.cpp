#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "caplmm/artifacts.hpp"
#include "caplmm/errors.hpp"

namespace {

int run_with_error_record(const caplmm::io::RunConfig& config) {
    try {
        return caplmm::io::run(config);
    } catch (const caplmm::dataset_error& e) {
        nlohmann::json err = {{"error", {{"type", "dataset"}, {"message", e.what()},
                                         {"field", e.field()}}}};
        std::cerr << err.dump() << "\n";
    } catch (const caplmm::capacity_error& e) {
        nlohmann::json err = {{"error",
                               {{"type", "capacity"},
                                {"message", e.what()},
                                {"required_qubits", e.required_qubits()}}}};
        std::cerr << err.dump() << "\n";
    } catch (const std::exception& e) {
        nlohmann::json err = {{"error", {{"type", "runtime"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "caplmm: interest-rate cap pricing under the LIBOR market model with "
        "analytic Black-76, classical Monte Carlo and quantum amplitude "
        "estimation pricers"};

    caplmm::io::RunConfig config;
    std::string methods_csv = "classical";
    std::string paths_csv = "10000";
    std::string replay_path;

    app.add_option("--dataset", config.dataset_path, "Path to the dataset file")
        ->envname("CAPLMM_DATASET");
    app.add_option("--method", methods_csv,
                   "Comma-separated methods: classical|hybrid|pure|all")
        ->envname("CAPLMM_METHOD");
    app.add_option("--paths", paths_csv, "Comma-separated MC path counts M")
        ->envname("CAPLMM_PATHS");
    app.add_option("--qubits", config.qubits_per_year,
                   "Loading qubits per year of maturity")
        ->envname("CAPLMM_QUBITS");
    app.add_option("--epsilon", config.epsilon, "IQAE target half-width")
        ->envname("CAPLMM_EPSILON");
    app.add_option("--alpha", config.alpha, "IQAE failure probability")
        ->envname("CAPLMM_ALPHA");
    app.add_option("--trials", config.trials, "Trials per (method, M) cell")
        ->envname("CAPLMM_TRIALS");
    app.add_option("--seed", config.seed, "Master seed; all randomness derives from it")
        ->envname("CAPLMM_SEED");
    app.add_option("--mode", config.mode, "IQAE measurement mode: exact|shots")
        ->envname("CAPLMM_MODE");
    app.add_option("--shots", config.shots_per_round, "IQAE shots per round (shots mode)")
        ->envname("CAPLMM_SHOTS");
    app.add_option("--c-approx", config.c_approx, "Payoff encoding scale c")
        ->envname("CAPLMM_C_APPROX");
    app.add_option("--threads", config.threads, "Worker thread count")
        ->envname("CAPLMM_THREADS");
    app.add_option("--out", config.out_dir, "Output directory for artifacts")
        ->envname("CAPLMM_OUT");
    app.add_flag("--plot", config.plot, "Also emit convergence.svg")
        ->envname("CAPLMM_PLOT");
    app.add_option("--replay", replay_path,
                   "Re-run the config embedded in an emitted artifact; other "
                   "flags except --out are ignored")
        ->envname("CAPLMM_REPLAY");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!replay_path.empty()) {
            caplmm::io::RunConfig replay =
                caplmm::io::run_config_from_artifact(replay_path);
            if (app.count("--out") > 0) replay.out_dir = config.out_dir;
            return run_with_error_record(replay);
        }

        config.methods.clear();
        for (std::size_t pos = 0; pos < methods_csv.size();) {
            const std::size_t comma = methods_csv.find(',', pos);
            const std::size_t end = comma == std::string::npos ? methods_csv.size() : comma;
            config.methods.push_back(methods_csv.substr(pos, end - pos));
            pos = end + 1;
        }
        config.path_grid.clear();
        for (std::size_t pos = 0; pos < paths_csv.size();) {
            const std::size_t comma = paths_csv.find(',', pos);
            const std::size_t end = comma == std::string::npos ? paths_csv.size() : comma;
            config.path_grid.push_back(std::stoull(paths_csv.substr(pos, end - pos)));
            pos = end + 1;
        }
        if (config.dataset_path.empty()) {
            std::cerr << R"({"error":{"type":"usage","message":"--dataset is required"}})"
                      << "\n";
            return 1;
        }
        return run_with_error_record(config);
    } catch (const std::exception& e) {
        nlohmann::json err = {{"error", {{"type", "usage"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
}
