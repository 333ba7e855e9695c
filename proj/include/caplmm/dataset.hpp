#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "caplmm/lmm.hpp"

namespace caplmm::io {

/// On-disk market dataset: the calibrated model inputs plus the cap
/// contract, a provenance note, and an optional frozen analytic price
/// recorded at transcription time.
struct DatasetFile {
    std::string name;
    std::string provenance;
    lmm::MarketDataset market;
    lmm::CapSpec cap;
    std::optional<double> expected_black76_price;
};

/// Parses and validates a dataset document (JSON text). Rates, vols and
/// strike are decimals; "units": "percent" converts by 1/100 on load.
/// Decimal-mode magnitudes above 1.0 are rejected with a unit warning
/// unless "force_decimal": true is set. Throws dataset_error naming the
/// offending field.
DatasetFile parse_dataset(const std::string& text);

DatasetFile load_dataset_file(const std::filesystem::path& path);

/// Market part only; the usual ingestion entry point.
lmm::MarketDataset load_dataset(const std::filesystem::path& path);

/// Serializes with round-trip-exact number formatting:
/// parse_dataset(serialize_dataset(d)) reproduces d exactly.
std::string serialize_dataset(const DatasetFile& dataset);

} // namespace caplmm::io
