#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "nsai/data.hpp"
#include "nsai/matrix.hpp"

namespace nsai {

/// Fully-connected net: input -> hidden1 (ReLU) -> hidden2 (ReLU) -> linear
/// scalar output. Default shape 4 -> 32 -> 16 -> 1. w1 is hidden1 x input,
/// w2 is hidden2 x hidden1, w3 is 1 x hidden2.
struct MlpParams {
    Matrix w1, w2, w3;
    std::vector<double> b1, b2, b3;

    std::size_t input_dim() const { return w1.cols; }
    std::size_t hidden1() const { return w1.rows; }
    std::size_t hidden2() const { return w2.rows; }

    /// All six parameter blocks in update order (w1,b1,w2,b2,w3,b3).
    std::array<std::span<double>, 6> blocks();
    std::array<std::span<const double>, 6> blocks() const;

    bool operator==(const MlpParams&) const = default;
};

/// Gradients are shape-congruent with the parameters they differentiate.
using Gradients = MlpParams;

struct ForwardTrace {
    std::vector<double> a1;  // post-ReLU, entrywise >= 0
    std::vector<double> a2;  // post-ReLU, entrywise >= 0; the learned features
    double y_hat = 0.0;
};

struct AdamState {
    MlpParams m;  // first-moment accumulators
    MlpParams v;  // second-moment accumulators, entrywise >= 0
    std::uint64_t t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double learning_rate = 1e-3;

    static AdamState init(const MlpParams& like, double learning_rate);
};

struct TrainConfig {
    std::size_t epochs = 2000;
    std::size_t batch_size = 32;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
    std::size_t hidden1 = 32;
    std::size_t hidden2 = 16;
};

struct LossHistory {
    std::vector<double> train_loss;  // per-epoch, sample-weighted mean of batch losses
    std::vector<double> val_loss;    // per-epoch, full validation set
};

/// He-uniform weights (bound sqrt(6 / fan_in), drawn row-major w1, w2, w3),
/// zero biases. Pure function of the seed.
MlpParams init_params(std::uint64_t seed, std::size_t input_dim = 4, std::size_t hidden1 = 32,
                      std::size_t hidden2 = 16);

ForwardTrace forward(const MlpParams& params, std::span<const double> x);

/// Predicted outputs for every row of x.
std::vector<double> predict(const MlpParams& params, const Matrix& x);

/// Mean-squared-error loss over the batch and its exact parameter
/// gradients (ReLU subgradient at 0 taken as 0). Throws on an empty batch.
std::pair<Gradients, double> backward(const MlpParams& params, const Matrix& batch_x,
                                      std::span<const double> batch_y);

/// One bias-corrected Adam update; t advances by exactly 1.
std::pair<MlpParams, AdamState> adam_step(const MlpParams& params, const Gradients& grads,
                                          const AdamState& state);

/// Seeded mini-batch training: parameters come from init_params(seed), each
/// epoch reshuffles the train indices from a derived stream, the final short
/// batch is trained on, and losses are recorded per epoch. An empty
/// validation set records 0 for val_loss. Deterministic per (data, config).
std::pair<MlpParams, LossHistory> train(const Matrix& x_train, const std::vector<double>& y_train,
                                        const Matrix& x_val, const std::vector<double>& y_val,
                                        const TrainConfig& config);

/// Row i holds forward(params, x.row(i)).a2 — the learned feature vector.
Matrix extract_features(const MlpParams& params, const Matrix& x);

struct SavedModel {
    MlpParams params;
    TrainConfig config;
    ScalerStats scaler;
};

/// Versioned little-endian binary model file (layout in README).
void save_model(const std::filesystem::path& path, const MlpParams& params,
                const TrainConfig& config, const ScalerStats& scaler);
SavedModel load_model(const std::filesystem::path& path);

}  // namespace nsai
