#include "caplmm/dataset.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "caplmm/errors.hpp"

namespace caplmm::io {

namespace {

using nlohmann::json;

double get_number(const json& j, const std::string& field) {
    if (!j.contains(field))
        throw dataset_error("dataset: missing field '" + field + "'", field);
    if (!j.at(field).is_number())
        throw dataset_error("dataset: field '" + field + "' must be a number", field);
    return j.at(field).get<double>();
}

std::vector<double> get_array(const json& j, const std::string& field) {
    if (!j.contains(field) || !j.at(field).is_array())
        throw dataset_error("dataset: field '" + field + "' must be an array", field);
    std::vector<double> out;
    for (const auto& v : j.at(field)) {
        if (!v.is_number())
            throw dataset_error("dataset: field '" + field + "' must hold numbers", field);
        out.push_back(v.get<double>());
    }
    return out;
}

void check_magnitude(double value, const std::string& field, bool force_decimal) {
    if (value > 1.0 && !force_decimal)
        throw dataset_error(
            "dataset: field '" + field + "' holds " + std::to_string(value) +
                ", which looks like a percent figure; rates must be decimals "
                "(set \"units\": \"percent\" to convert on load, or "
                "\"force_decimal\": true to override)",
            field);
}

} // namespace

DatasetFile parse_dataset(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw dataset_error(std::string("dataset: JSON parse error: ") + e.what());
    }

    double rate_scale = 1.0;
    bool percent = false;
    if (j.contains("units")) {
        const std::string units = j.at("units").get<std::string>();
        if (units == "percent") {
            percent = true;
            rate_scale = 0.01;
        } else if (units != "decimal") {
            throw dataset_error("dataset: units must be 'decimal' or 'percent'", "units");
        }
    }
    const bool force_decimal = j.value("force_decimal", false);

    DatasetFile file;
    file.name = j.value("name", std::string{});
    file.provenance = j.value("provenance", std::string{});

    file.market.tenor.dates = get_array(j, "tenor_dates");
    file.market.tenor.fractions = get_array(j, "year_fractions");

    file.market.stub_rate = get_number(j, "stub_rate") * rate_scale;
    if (!percent) check_magnitude(file.market.stub_rate, "stub_rate", force_decimal);

    file.market.curve.forwards = get_array(j, "forwards");
    for (double& f : file.market.curve.forwards) {
        if (!percent) check_magnitude(f, "forwards", force_decimal);
        f *= rate_scale;
    }

    if (!j.contains("vol_table") || !j.at("vol_table").is_array())
        throw dataset_error("dataset: field 'vol_table' must be an array of rows",
                            "vol_table");
    std::size_t row_index = 0;
    for (const auto& row : j.at("vol_table")) {
        ++row_index;
        if (!row.is_array())
            throw dataset_error("dataset: vol_table row " + std::to_string(row_index) +
                                    " must be an array",
                                "vol_table");
        std::vector<double> vols;
        for (const auto& v : row) {
            double x = v.get<double>();
            if (!percent) check_magnitude(x, "vol_table", force_decimal);
            vols.push_back(x * rate_scale);
        }
        file.market.vols.rows.push_back(std::move(vols));
    }

    if (j.contains("correlation") && !j.at("correlation").is_null()) {
        std::vector<std::vector<double>> rho;
        for (const auto& row : j.at("correlation"))
            rho.push_back(row.get<std::vector<double>>());
        file.market.correlation = std::move(rho);
    }

    if (!j.contains("cap") || !j.at("cap").is_object())
        throw dataset_error("dataset: missing 'cap' object", "cap");
    const json& cap = j.at("cap");
    file.cap.strike = get_number(cap, "strike") * rate_scale;
    if (!percent) check_magnitude(file.cap.strike / rate_scale, "cap.strike", force_decimal);
    file.cap.first_caplet = cap.value("first_caplet", std::size_t{1});
    file.cap.last_caplet =
        cap.value("last_caplet", file.market.tenor.fractions.size());
    file.cap.notional = cap.value("notional", 1.0);

    if (j.contains("expected_black76_price"))
        file.expected_black76_price = j.at("expected_black76_price").get<double>();

    try {
        file.market.validate();
        file.cap.validate(file.market.periods());
    } catch (const std::exception& e) {
        throw dataset_error(std::string("dataset: invalid contents: ") + e.what());
    }
    return file;
}

DatasetFile load_dataset_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw dataset_error("dataset: cannot open file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_dataset(buffer.str());
}

lmm::MarketDataset load_dataset(const std::filesystem::path& path) {
    return load_dataset_file(path).market;
}

std::string serialize_dataset(const DatasetFile& dataset) {
    json j;
    j["name"] = dataset.name;
    j["provenance"] = dataset.provenance;
    j["units"] = "decimal";
    j["tenor_dates"] = dataset.market.tenor.dates;
    j["year_fractions"] = dataset.market.tenor.fractions;
    j["stub_rate"] = dataset.market.stub_rate;
    j["forwards"] = dataset.market.curve.forwards;
    j["vol_table"] = dataset.market.vols.rows;
    if (dataset.market.correlation)
        j["correlation"] = *dataset.market.correlation;
    else
        j["correlation"] = nullptr;
    j["cap"] = {{"strike", dataset.cap.strike},
                {"first_caplet", dataset.cap.first_caplet},
                {"last_caplet", dataset.cap.last_caplet},
                {"notional", dataset.cap.notional}};
    if (dataset.expected_black76_price)
        j["expected_black76_price"] = *dataset.expected_black76_price;
    return j.dump(2) + "\n";
}

} // namespace caplmm::io
