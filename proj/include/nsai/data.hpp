#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nsai/matrix.hpp"

namespace nsai {

inline constexpr std::size_t kFeatureCount = 4;
inline constexpr std::array<std::string_view, 5> kCsvColumns = {
    "infill_pct", "layer_height_mm", "print_speed_mm_s",
    "extrusion_temp_c", "impact_strength_kj_m2"};

/// One experimental row: four FDM process parameters and the measured
/// impact strength. Physical ranges are enforced when parsing CSV input;
/// derived datasets (standardized or synthetic) may hold transformed values.
struct ExperimentRecord {
    double infill_pct = 0.0;        // (0, 100]
    double layer_height = 0.0;      // mm, (0, 0.5]
    double print_speed = 0.0;       // mm/s, (0, 120]
    double extrusion_temp = 0.0;    // degC, [150, 260]
    double impact_strength = 0.0;   // kJ/m^2, (0, 20)

    std::array<double, 5> as_array() const {
        return {infill_pct, layer_height, print_speed, extrusion_temp, impact_strength};
    }
    static ExperimentRecord from_array(const std::array<double, 5>& a) {
        return {a[0], a[1], a[2], a[3], a[4]};
    }

    bool operator==(const ExperimentRecord&) const = default;
};

struct Dataset {
    std::vector<ExperimentRecord> records;
    std::array<std::string, kFeatureCount> feature_names = {
        std::string(kCsvColumns[0]), std::string(kCsvColumns[1]),
        std::string(kCsvColumns[2]), std::string(kCsvColumns[3])};

    std::size_t size() const { return records.size(); }

    /// n x 4 feature matrix, rows in record order.
    Matrix features() const;
    std::vector<double> targets() const;

    bool operator==(const Dataset&) const = default;
};

/// Per-feature mean and sample standard deviation used for z-scoring.
/// The target column is never scaled.
struct ScalerStats {
    std::array<double, kFeatureCount> mean{};
    std::array<double, kFeatureCount> std{};

    ExperimentRecord transform(const ExperimentRecord& r) const;
    ExperimentRecord inverse(const ExperimentRecord& r) const;
};

struct TrainValSplit {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> val_indices;
    std::uint64_t seed = 0;
};

/// Throws ValidationError when a field is non-finite or outside its
/// physical range; `row` is a 1-based body row number for the message.
void validate_record(const ExperimentRecord& rec, std::size_t row);

/// Parses the 5-column CSV schema (header row required, names checked).
/// Every body row is range-validated. Throws ParseError / ValidationError
/// with the offending row and column named.
Dataset parse_dataset(std::string_view csv_text);

/// Canonical CSV form: header plus one row per record, LF line endings,
/// shortest round-trip number formatting.
std::string serialize_dataset(const Dataset& ds);

Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const std::filesystem::path& path, const Dataset& ds);

/// Mean / sample std over the given rows only (pass all indices for
/// whole-dataset statistics). Throws on fewer than 2 rows or a
/// zero-variance feature column.
ScalerStats compute_scaler(const Dataset& ds, std::span<const std::size_t> rows);

/// Applies z-scoring to every record's features; targets pass through.
Dataset apply_scaler(const Dataset& ds, const ScalerStats& stats);

/// Whole-dataset standardization: stats over all records, then transform.
std::pair<Dataset, ScalerStats> standardize(const Dataset& ds);

/// Deterministic shuffled partition: round(n * train_fraction) train rows,
/// remainder validation. Index lists are sorted ascending. Throws when the
/// train side would have < 2 rows or the validation side < 1.
TrainValSplit split(const Dataset& ds, double train_fraction, std::uint64_t seed);

}  // namespace nsai
