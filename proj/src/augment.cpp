#include "nsai/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nsai/errors.hpp"
#include "nsai/rng.hpp"

namespace nsai {

namespace {

struct ColumnStats {
    double sd = 0.0;
    double min = 0.0;
    double max = 0.0;
};

std::array<ColumnStats, 5> column_stats(const Dataset& ds) {
    std::array<ColumnStats, 5> out{};
    const std::size_t n = ds.size();
    for (std::size_t c = 0; c < 5; ++c) {
        double sum = 0.0, lo = ds.records[0].as_array()[c], hi = lo;
        for (const auto& r : ds.records) {
            const double v = r.as_array()[c];
            sum += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (const auto& r : ds.records) {
            const double d = r.as_array()[c] - mean;
            ss += d * d;
        }
        out[c].sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
        out[c].min = lo;
        out[c].max = hi;
    }
    return out;
}

}  // namespace

Dataset augment_tabular(const Dataset& ds, const AugmentConfig& config) {
    if (ds.size() == 0) throw ValidationError("augment: source dataset is empty");
    if (config.noise_scale < 0.0) {
        throw ValidationError("augment: noise_scale must be >= 0");
    }
    const std::size_t n = ds.size();
    if (config.target_size < n) {
        throw ValidationError("augment: target_size " + std::to_string(config.target_size) +
                              " is smaller than source size " + std::to_string(n));
    }

    Dataset out;
    out.feature_names = ds.feature_names;
    out.records = ds.records;  // originals verbatim, prefix order preserved
    if (config.target_size == n) return out;

    const auto stats = column_stats(ds);
    out.records.reserve(config.target_size);
    Rng rng(config.seed);
    for (std::size_t k = n; k < config.target_size; ++k) {
        const std::size_t src = rng.uniform_index(n);
        auto vals = ds.records[src].as_array();
        for (std::size_t c = 0; c < 5; ++c) {
            double v = vals[c] + rng.gaussian() * config.noise_scale * stats[c].sd;
            if (config.clamp) v = std::clamp(v, stats[c].min, stats[c].max);
            vals[c] = v;
        }
        out.records.push_back(ExperimentRecord::from_array(vals));
    }
    return out;
}

SineDemoResult sine_demo(std::size_t n_original, std::size_t n_synthetic, double noise_sd,
                         std::uint64_t seed) {
    if (n_original < 1 || n_synthetic < 1) {
        throw ValidationError("sine_demo: point counts must be >= 1");
    }
    if (noise_sd < 0.0) throw ValidationError("sine_demo: noise_sd must be >= 0");

    SineDemoResult res;
    res.original.reserve(n_original);
    res.synthetic.reserve(n_synthetic);
    Rng rng(seed);

    const double span = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < n_original; ++i) {
        const double x = n_original == 1
                             ? 0.0
                             : span * static_cast<double>(i) / static_cast<double>(n_original - 1);
        res.original.push_back({x, std::sin(x) + rng.gaussian() * noise_sd});
    }
    for (std::size_t k = 0; k < n_synthetic; ++k) {
        const auto& src = res.original[rng.uniform_index(n_original)];
        res.synthetic.push_back({src.x, src.y + rng.gaussian() * noise_sd});
    }
    return res;
}

}  // namespace nsai
