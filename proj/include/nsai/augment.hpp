#pragma once

#include <cstdint>
#include <vector>

#include "nsai/data.hpp"

namespace nsai {

struct AugmentConfig {
    std::size_t target_size = 1000;
    double noise_scale = 0.05;  // multiplies each column's sample std
    std::uint64_t seed = 0;
    bool clamp = true;          // keep synthetic values inside source [min, max]
};

/// Jittered resampling: the originals are kept verbatim as a prefix, then
/// synthetic rows are drawn by picking a source row uniformly and adding
/// independent zero-mean Gaussian noise (std = noise_scale * column sample
/// std) to all four features and the target. With clamp on, every synthetic
/// value is clamped to its column's observed range. Output is a pure
/// function of (dataset, config). A single-row source has zero spread, so
/// its synthetic rows are exact copies.
Dataset augment_tabular(const Dataset& ds, const AugmentConfig& config);

struct XyPoint {
    double x = 0.0;
    double y = 0.0;
};

struct SineDemoResult {
    std::vector<XyPoint> original;
    std::vector<XyPoint> synthetic;
};

/// Toy augmentation demo: originals are sin(x) plus Gaussian noise on an
/// even grid over [0, 2pi]; synthetic points resample originals (keeping x)
/// and jitter y with the same noise level. Deterministic per seed.
SineDemoResult sine_demo(std::size_t n_original, std::size_t n_synthetic, double noise_sd,
                         std::uint64_t seed);

}  // namespace nsai
