#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nsai/augment.hpp"
#include "nsai/data.hpp"
#include "nsai/metrics.hpp"
#include "nsai/mlp.hpp"
#include "nsai/rng.hpp"
#include "nsai/tree.hpp"

namespace nsai {

inline constexpr const char* kVersion = "0.1.0";

enum class ModelKind { simple_ann, neurosymbolic, both };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& text);

struct SplitConfig {
    double train_fraction = 0.8;
    bool split_first = false;  // split originals before augmenting (no leakage)
};

/// Full study configuration. One master seed feeds three derived streams
/// (augment=1, split=2, train=3) unless a stage seed is pinned explicitly
/// in the config file.
struct ExperimentConfig {
    std::filesystem::path data_path = "data/table1.csv";
    std::uint64_t seed = 7;
    AugmentConfig augment;
    SplitConfig split;
    TrainConfig train;
    TreeConfig tree;
    std::filesystem::path output_dir = "out";
    ModelKind model_kind = ModelKind::both;
    bool shared_network = true;  // compare evaluates head and tree on one trained net

    std::optional<std::uint64_t> augment_seed;
    std::optional<std::uint64_t> split_seed;
    std::optional<std::uint64_t> train_seed;

    std::uint64_t effective_augment_seed() const { return augment_seed.value_or(derive_seed(seed, 1)); }
    std::uint64_t effective_split_seed() const { return split_seed.value_or(derive_seed(seed, 2)); }
    std::uint64_t effective_train_seed() const { return train_seed.value_or(derive_seed(seed, 3)); }
};

ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& cfg);

/// Throws unless the referenced data path exists and nested settings are
/// self-consistent.
void validate_config(const ExperimentConfig& cfg);

/// Standardized matrices ready for training. Scaler statistics always come
/// from the training rows only; validation rows reuse them.
struct PreparedData {
    Matrix x_train, x_val;
    std::vector<double> y_train, y_val;
    ScalerStats scaler;
    Dataset augmented;         // train block first when split_first
    std::size_t n_original = 0;
    std::uint64_t dataset_hash = 0;  // FNV-1a 64 of the raw CSV bytes
};

PreparedData prepare_data(const ExperimentConfig& cfg);

/// Everything produced by evaluating one model on one prepared dataset.
struct ModelRun {
    ModelReport report;
    LossHistory history;
    std::vector<double> pred_train, pred_val;
    MlpParams params;
    TrainConfig train_config;  // with the resolved seed
    std::optional<RegressionTree> tree;
};

struct CompareResult {
    ModelRun simple_ann;
    ModelRun neurosymbolic;
};

/// Baseline: the network's own linear head predicts. Writes artifacts
/// (model, loss history, prediction CSVs, manifest) into cfg.output_dir.
ModelRun run_simple_ann(const ExperimentConfig& cfg);

/// Hybrid: a depth-limited tree fit on the second hidden layer's
/// activations predicts. Also writes the exported rule text.
ModelRun run_neurosymbolic(const ExperimentConfig& cfg);

/// Trains on one shared prepared dataset and evaluates both models on the
/// identical split (one shared network by default, a second independently
/// seeded training when cfg.shared_network is false). Writes
/// comparison.csv plus both models' artifacts.
CompareResult compare(const ExperimentConfig& cfg);

std::string winner_summary(const ModelReport& simple_ann, const ModelReport& neurosymbolic);

// ---- artifact writers -------------------------------------------------

void write_loss_history_csv(const std::filesystem::path& path, const LossHistory& history);
void write_pred_csv(const std::filesystem::path& path, std::span<const double> y_true,
                    std::span<const double> y_pred);
void write_comparison_csv(const std::filesystem::path& path,
                          const std::vector<ModelReport>& reports);
void write_sine_demo_csv(const std::filesystem::path& out_dir, const SineDemoResult& demo);
void write_manifest(const std::filesystem::path& out_dir, const ExperimentConfig& cfg,
                    std::uint64_t dataset_hash);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace nsai
