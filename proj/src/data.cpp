#include "nsai/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "nsai/errors.hpp"
#include "nsai/rng.hpp"
#include "nsai/text.hpp"

namespace nsai {

namespace {

struct FieldRange {
    double lo, hi;
    bool lo_open, hi_open;
};

// infill (0,100], layer (0,0.5], speed (0,120], temp [150,260], impact (0,20)
constexpr std::array<FieldRange, 5> kRanges = {{
    {0.0, 100.0, true, false},
    {0.0, 0.5, true, false},
    {0.0, 120.0, true, false},
    {150.0, 260.0, false, false},
    {0.0, 20.0, true, true},
}};

bool in_range(double v, const FieldRange& r) {
    if (!std::isfinite(v)) return false;
    if (r.lo_open ? v <= r.lo : v < r.lo) return false;
    if (r.hi_open ? v >= r.hi : v > r.hi) return false;
    return true;
}

std::string range_text(const FieldRange& r) {
    std::string s = r.lo_open ? "(" : "[";
    s += fmt_double(r.lo) + ", " + fmt_double(r.hi);
    s += r.hi_open ? ")" : "]";
    return s;
}

}  // namespace

Matrix Dataset::features() const {
    Matrix m(records.size(), kFeatureCount);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto a = records[i].as_array();
        for (std::size_t j = 0; j < kFeatureCount; ++j) m(i, j) = a[j];
    }
    return m;
}

std::vector<double> Dataset::targets() const {
    std::vector<double> y;
    y.reserve(records.size());
    for (const auto& r : records) y.push_back(r.impact_strength);
    return y;
}

ExperimentRecord ScalerStats::transform(const ExperimentRecord& r) const {
    auto a = r.as_array();
    for (std::size_t j = 0; j < kFeatureCount; ++j) a[j] = (a[j] - mean[j]) / std[j];
    return ExperimentRecord::from_array(a);
}

ExperimentRecord ScalerStats::inverse(const ExperimentRecord& r) const {
    auto a = r.as_array();
    for (std::size_t j = 0; j < kFeatureCount; ++j) a[j] = a[j] * std[j] + mean[j];
    return ExperimentRecord::from_array(a);
}

void validate_record(const ExperimentRecord& rec, std::size_t row) {
    const auto vals = rec.as_array();
    for (std::size_t c = 0; c < vals.size(); ++c) {
        if (!in_range(vals[c], kRanges[c])) {
            throw ValidationError("row " + std::to_string(row) + ", column '" +
                                  std::string(kCsvColumns[c]) + "': value " +
                                  fmt_double(vals[c]) + " out of range " +
                                  range_text(kRanges[c]));
        }
    }
}

Dataset parse_dataset(std::string_view csv_text) {
    const auto lines = split_lines(csv_text);
    if (lines.empty()) throw ParseError("empty input: missing header row");

    const auto header = split_fields(lines[0]);
    if (header.size() != kCsvColumns.size()) {
        throw ParseError("header: expected " + std::to_string(kCsvColumns.size()) +
                         " columns, got " + std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < kCsvColumns.size(); ++c) {
        if (trim(header[c]) != kCsvColumns[c]) {
            throw ParseError("header column " + std::to_string(c + 1) + ": expected '" +
                             std::string(kCsvColumns[c]) + "', got '" +
                             std::string(trim(header[c])) + "'");
        }
    }
    if (lines.size() == 1) throw ParseError("empty body: no data rows after header");

    Dataset ds;
    ds.records.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t row = i;  // 1-based body row
        const auto fields = split_fields(lines[i]);
        if (fields.size() != kCsvColumns.size()) {
            throw ParseError("row " + std::to_string(row) + ": expected " +
                             std::to_string(kCsvColumns.size()) + " columns, got " +
                             std::to_string(fields.size()));
        }
        std::array<double, 5> vals{};
        for (std::size_t c = 0; c < fields.size(); ++c) {
            vals[c] = parse_double(fields[c], "row " + std::to_string(row) + ", column '" +
                                                  std::string(kCsvColumns[c]) + "'");
        }
        const auto rec = ExperimentRecord::from_array(vals);
        validate_record(rec, row);
        ds.records.push_back(rec);
    }
    return ds;
}

std::string serialize_dataset(const Dataset& ds) {
    std::string out;
    for (std::size_t c = 0; c < kCsvColumns.size(); ++c) {
        if (c) out += ',';
        out += kCsvColumns[c];
    }
    out += '\n';
    for (const auto& rec : ds.records) {
        const auto vals = rec.as_array();
        for (std::size_t c = 0; c < vals.size(); ++c) {
            if (c) out += ',';
            out += fmt_double(vals[c]);
        }
        out += '\n';
    }
    return out;
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dataset(buf.str());
}

void save_dataset(const std::filesystem::path& path, const Dataset& ds) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write dataset file: " + path.string());
    out << serialize_dataset(ds);
}

ScalerStats compute_scaler(const Dataset& ds, std::span<const std::size_t> rows) {
    if (rows.size() < 2) {
        throw ValidationError("scaler statistics need at least 2 rows, got " +
                              std::to_string(rows.size()));
    }
    ScalerStats s{};
    const double n = static_cast<double>(rows.size());
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        double sum = 0.0;
        for (std::size_t i : rows) sum += ds.records[i].as_array()[j];
        const double mean = sum / n;
        double ss = 0.0;
        for (std::size_t i : rows) {
            const double d = ds.records[i].as_array()[j] - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / (n - 1.0));
        if (!(sd > 0.0) || !std::isfinite(sd)) {
            throw ValidationError("zero-variance feature column '" +
                                  std::string(kCsvColumns[j]) + "'");
        }
        s.mean[j] = mean;
        s.std[j] = sd;
    }
    return s;
}

Dataset apply_scaler(const Dataset& ds, const ScalerStats& stats) {
    Dataset out;
    out.feature_names = ds.feature_names;
    out.records.reserve(ds.size());
    for (const auto& r : ds.records) out.records.push_back(stats.transform(r));
    return out;
}

std::pair<Dataset, ScalerStats> standardize(const Dataset& ds) {
    std::vector<std::size_t> all(ds.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const ScalerStats stats = compute_scaler(ds, all);
    return {apply_scaler(ds, stats), stats};
}

TrainValSplit split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ValidationError("train_fraction must lie in (0, 1), got " +
                              fmt_double(train_fraction));
    }
    const std::size_t n = ds.size();
    const auto n_train =
        static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    if (n_train < 2 || n_train >= n) {
        throw ValidationError("degenerate split sizes: " + std::to_string(n_train) +
                              " train / " + std::to_string(n - n_train) + " val from n=" +
                              std::to_string(n));
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(idx);

    TrainValSplit out;
    out.seed = seed;
    out.train_indices.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.val_indices.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    std::sort(out.train_indices.begin(), out.train_indices.end());
    std::sort(out.val_indices.begin(), out.val_indices.end());
    return out;
}

}  // namespace nsai
