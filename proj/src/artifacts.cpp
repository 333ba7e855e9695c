#include "caplmm/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "caplmm/errors.hpp"

namespace caplmm::io {

namespace {

using nlohmann::json;

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file " + path.string());
    out << text;
}

std::string config_line(const RunConfig& config) {
    return "# runconfig: " + run_config_to_json(config) + "\n";
}

} // namespace

std::string format_number(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::string run_config_to_json(const RunConfig& config) {
    json j;
    j["dataset"] = config.dataset_path;
    j["methods"] = config.methods;
    j["paths"] = config.path_grid;
    j["qubits"] = config.qubits_per_year;
    j["epsilon"] = config.epsilon;
    j["alpha"] = config.alpha;
    j["trials"] = config.trials;
    j["seed"] = config.seed;
    j["mode"] = config.mode;
    j["shots"] = config.shots_per_round;
    j["c_approx"] = config.c_approx;
    j["threads"] = config.threads;
    j["out"] = config.out_dir;
    j["plot"] = config.plot;
    return j.dump();
}

RunConfig run_config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("runconfig: parse error: ") + e.what());
    }
    RunConfig config;
    config.dataset_path = j.value("dataset", config.dataset_path);
    if (j.contains("methods"))
        config.methods = j.at("methods").get<std::vector<std::string>>();
    if (j.contains("paths"))
        config.path_grid = j.at("paths").get<std::vector<std::uint64_t>>();
    config.qubits_per_year = j.value("qubits", config.qubits_per_year);
    config.epsilon = j.value("epsilon", config.epsilon);
    config.alpha = j.value("alpha", config.alpha);
    config.trials = j.value("trials", config.trials);
    config.seed = j.value("seed", config.seed);
    config.mode = j.value("mode", config.mode);
    config.shots_per_round = j.value("shots", config.shots_per_round);
    config.c_approx = j.value("c_approx", config.c_approx);
    config.threads = j.value("threads", config.threads);
    config.out_dir = j.value("out", config.out_dir);
    config.plot = j.value("plot", config.plot);
    return config;
}

RunConfig run_config_from_artifact(const std::filesystem::path& artifact) {
    std::ifstream in(artifact);
    if (!in)
        throw std::runtime_error("cannot open artifact " + artifact.string());
    std::string line;
    std::getline(in, line);
    const std::string prefix = "# runconfig: ";
    if (line.rfind(prefix, 0) != 0)
        throw std::runtime_error("artifact " + artifact.string() +
                                 " has no embedded runconfig line");
    return run_config_from_json(line.substr(prefix.size()));
}

pricers::MethodConfig method_config_from_run(const RunConfig& config) {
    pricers::MethodConfig cfg;
    cfg.qubits_per_year = config.qubits_per_year;
    cfg.epsilon = config.epsilon;
    cfg.alpha = config.alpha;
    cfg.seed = config.seed;
    cfg.trials = config.trials;
    cfg.mode = (config.mode == "shots") ? amp::QaeMode::shots : amp::QaeMode::exact;
    cfg.shots_per_round = config.shots_per_round;
    cfg.c_approx = config.c_approx;
    cfg.threads = config.threads;
    if (config.mode != "exact" && config.mode != "shots")
        throw std::invalid_argument("runconfig: mode must be 'exact' or 'shots'");
    return cfg;
}

void write_convergence_csv(const std::filesystem::path& path, const RunConfig& config,
                           const std::vector<pricers::ConvergenceRecord>& records) {
    std::ostringstream out;
    out << config_line(config);
    out << "method,M,trial,estimate,abs_error\n";
    for (const auto& r : records) {
        out << mc::method_name(r.method) << ',' << r.paths << ',' << r.trial << ','
            << format_number(r.estimate) << ',' << format_number(r.abs_error) << '\n';
    }
    write_text_file(path, out.str());
}

void write_price_summary(const std::filesystem::path& path, const RunConfig& config,
                         const std::vector<mc::PriceEstimate>& estimates) {
    std::ostringstream out;
    out << config_line(config);
    out << "method,value,std_error,n_samples\n";
    for (const auto& e : estimates) {
        out << mc::method_name(e.method) << ',' << format_number(e.value) << ','
            << format_number(e.std_error) << ',' << e.n_samples << '\n';
    }
    write_text_file(path, out.str());
}

void write_qubit_table(const std::filesystem::path& path, const RunConfig& config,
                       const std::vector<std::uint64_t>& n_range,
                       const std::vector<std::uint64_t>& t_range) {
    std::ostringstream out;
    out << config_line(config);
    out << "n,T,loading,comparator,y_rotation,total\n";
    for (std::uint64_t n : n_range) {
        for (std::uint64_t t : t_range) {
            const auto q = pricers::qubit_count(n, t);
            out << n << ',' << t << ',' << q.loading << ',' << q.comparator << ','
                << q.y_rotation << ',' << q.total << '\n';
        }
    }
    write_text_file(path, out.str());
}

void write_convergence_svg(const std::filesystem::path& path,
                           const std::vector<pricers::ConvergenceRecord>& records) {
    // Mean absolute error per (method, M) on log-log axes.
    std::map<std::string, std::map<std::uint64_t, std::pair<double, unsigned>>> curves;
    for (const auto& r : records) {
        auto& cell = curves[std::string(mc::method_name(r.method))][r.paths];
        cell.first += r.abs_error;
        cell.second += 1;
    }

    double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
    for (const auto& [name, curve] : curves) {
        for (const auto& [paths, cell] : curve) {
            const double mean = cell.first / cell.second;
            if (mean <= 0.0) continue;
            min_x = std::min(min_x, std::log10(static_cast<double>(paths)));
            max_x = std::max(max_x, std::log10(static_cast<double>(paths)));
            min_y = std::min(min_y, std::log10(mean));
            max_y = std::max(max_y, std::log10(mean));
        }
    }
    if (min_x > max_x) { min_x = 0.0; max_x = 1.0; }
    if (min_y > max_y) { min_y = -1.0; max_y = 0.0; }
    if (max_x - min_x < 1e-9) max_x = min_x + 1.0;
    if (max_y - min_y < 1e-9) max_y = min_y + 1.0;

    const double width = 640.0, height = 480.0, margin = 60.0;
    const auto sx = [&](double lx) {
        return margin + (lx - min_x) / (max_x - min_x) * (width - 2 * margin);
    };
    const auto sy = [&](double ly) {
        return height - margin - (ly - min_y) / (max_y - min_y) * (height - 2 * margin);
    };

    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
           "viewBox=\"0 0 640 480\">\n";
    out << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
        << width - margin << "\" y2=\"" << height - margin
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
        << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << width / 2
        << "\" y=\"470\" text-anchor=\"middle\" font-size=\"14\">number of "
           "simulations M (log10)</text>\n";
    out << "<text x=\"15\" y=\"" << height / 2
        << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 15 "
        << height / 2 << ")\">mean abs error (log10)</text>\n";

    std::size_t color = 0;
    double legend_y = margin;
    for (const auto& [name, curve] : curves) {
        std::ostringstream points;
        for (const auto& [paths, cell] : curve) {
            const double mean = cell.first / cell.second;
            if (mean <= 0.0) continue;
            points << sx(std::log10(static_cast<double>(paths))) << ','
                   << sy(std::log10(mean)) << ' ';
        }
        const char* stroke = kColors[color % 4];
        out << "<polyline fill=\"none\" stroke=\"" << stroke
            << "\" stroke-width=\"2\" points=\"" << points.str() << "\"/>\n";
        out << "<text x=\"" << width - margin - 150 << "\" y=\"" << legend_y
            << "\" font-size=\"13\" fill=\"" << stroke << "\">" << name
            << "</text>\n";
        legend_y += 18.0;
        ++color;
    }
    out << "</svg>\n";
    write_text_file(path, out.str());
}

int run(const RunConfig& config) {
    const DatasetFile file = load_dataset_file(config.dataset_path);
    const pricers::MethodConfig base = method_config_from_run(config);

    std::vector<mc::Method> methods;
    for (const auto& name : config.methods) {
        if (name == "all") {
            methods = {mc::Method::classical, mc::Method::hybrid,
                       mc::Method::pure_quantum};
            break;
        }
        methods.push_back(mc::method_from_name(name));
    }
    if (methods.empty())
        throw std::invalid_argument("run: no methods configured");

    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path out_dir(config.out_dir);

    // Price summary at the largest configured path count, analytic row first.
    std::vector<mc::PriceEstimate> summary;
    {
        pricers::MethodConfig cfg = base;
        cfg.method = mc::Method::analytic;
        summary.push_back(pricers::price(file.market, file.cap, cfg));
        cfg.paths = *std::max_element(config.path_grid.begin(), config.path_grid.end());
        for (mc::Method m : methods) {
            cfg.method = m;
            summary.push_back(pricers::price(file.market, file.cap, cfg));
        }
    }
    write_price_summary(out_dir / "price_summary.csv", config, summary);

    const auto records = pricers::convergence_experiment(
        file.market, file.cap, methods, config.path_grid, config.trials, base);
    write_convergence_csv(out_dir / "convergence.csv", config, records);

    std::vector<std::uint64_t> n_range = {1, 2, 3, 4, 5, 6};
    std::vector<std::uint64_t> t_range = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    write_qubit_table(out_dir / "qubit_table.csv", config, n_range, t_range);

    if (config.plot)
        write_convergence_svg(out_dir / "convergence.svg", records);
    return 0;
}

} // namespace caplmm::io
