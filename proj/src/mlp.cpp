#include "nsai/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "nsai/errors.hpp"
#include "nsai/rng.hpp"

namespace nsai {

namespace {

constexpr char kModelMagic[8] = {'N', 'S', 'A', 'I', 'M', 'L', 'P', '1'};
constexpr std::uint32_t kModelVersion = 1;

// Sub-stream id for the per-epoch shuffle rng derived from the train seed.
constexpr std::uint64_t kShuffleStream = 17;

void affine(const Matrix& w, std::span<const double> b, std::span<const double> x,
            std::span<double> out) {
    for (std::size_t i = 0; i < w.rows; ++i) {
        double acc = b[i];
        const double* wr = w.data.data() + i * w.cols;
        for (std::size_t j = 0; j < w.cols; ++j) acc += wr[j] * x[j];
        out[i] = acc;
    }
}

void relu_inplace(std::span<double> v) {
    for (double& x : v) x = x > 0.0 ? x : 0.0;
}

MlpParams zeros_like(const MlpParams& p) {
    MlpParams z;
    z.w1 = Matrix(p.w1.rows, p.w1.cols);
    z.w2 = Matrix(p.w2.rows, p.w2.cols);
    z.w3 = Matrix(p.w3.rows, p.w3.cols);
    z.b1.assign(p.b1.size(), 0.0);
    z.b2.assign(p.b2.size(), 0.0);
    z.b3.assign(p.b3.size(), 0.0);
    return z;
}

template <class T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void read_pod(std::istream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

std::array<std::span<double>, 6> MlpParams::blocks() {
    return {std::span<double>(w1.data), std::span<double>(b1), std::span<double>(w2.data),
            std::span<double>(b2), std::span<double>(w3.data), std::span<double>(b3)};
}

std::array<std::span<const double>, 6> MlpParams::blocks() const {
    return {std::span<const double>(w1.data), std::span<const double>(b1),
            std::span<const double>(w2.data), std::span<const double>(b2),
            std::span<const double>(w3.data), std::span<const double>(b3)};
}

AdamState AdamState::init(const MlpParams& like, double learning_rate) {
    AdamState s;
    s.m = zeros_like(like);
    s.v = zeros_like(like);
    s.learning_rate = learning_rate;
    return s;
}

MlpParams init_params(std::uint64_t seed, std::size_t input_dim, std::size_t hidden1,
                      std::size_t hidden2) {
    MlpParams p;
    p.w1 = Matrix(hidden1, input_dim);
    p.w2 = Matrix(hidden2, hidden1);
    p.w3 = Matrix(1, hidden2);
    p.b1.assign(hidden1, 0.0);
    p.b2.assign(hidden2, 0.0);
    p.b3.assign(1, 0.0);

    Rng rng(seed);
    auto he_fill = [&rng](Matrix& w) {
        const double bound = std::sqrt(6.0 / static_cast<double>(w.cols));
        for (double& v : w.data) v = (2.0 * rng.uniform() - 1.0) * bound;
    };
    he_fill(p.w1);
    he_fill(p.w2);
    he_fill(p.w3);
    return p;
}

ForwardTrace forward(const MlpParams& params, std::span<const double> x) {
    ForwardTrace t;
    t.a1.resize(params.hidden1());
    t.a2.resize(params.hidden2());
    affine(params.w1, params.b1, x, t.a1);
    relu_inplace(t.a1);
    affine(params.w2, params.b2, t.a1, t.a2);
    relu_inplace(t.a2);
    double y = params.b3[0];
    for (std::size_t j = 0; j < params.hidden2(); ++j) y += params.w3(0, j) * t.a2[j];
    t.y_hat = y;
    return t;
}

std::vector<double> predict(const MlpParams& params, const Matrix& x) {
    std::vector<double> out;
    out.reserve(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) out.push_back(forward(params, x.row(i)).y_hat);
    return out;
}

std::pair<Gradients, double> backward(const MlpParams& params, const Matrix& batch_x,
                                      std::span<const double> batch_y) {
    if (batch_x.rows == 0) throw ValidationError("backward: empty batch");
    if (batch_x.rows != batch_y.size()) {
        throw ValidationError("backward: batch_x rows and batch_y length differ");
    }

    const std::size_t h1 = params.hidden1();
    const std::size_t h2 = params.hidden2();
    const std::size_t in = params.input_dim();
    const double inv_b = 1.0 / static_cast<double>(batch_x.rows);

    Gradients g = zeros_like(params);
    std::vector<double> a1(h1), a2(h2), delta2(h2), delta1(h1);
    double loss = 0.0;

    for (std::size_t s = 0; s < batch_x.rows; ++s) {
        const auto x = batch_x.row(s);
        affine(params.w1, params.b1, x, a1);
        relu_inplace(a1);
        affine(params.w2, params.b2, a1, a2);
        relu_inplace(a2);
        double y_hat = params.b3[0];
        for (std::size_t j = 0; j < h2; ++j) y_hat += params.w3(0, j) * a2[j];

        const double residual = y_hat - batch_y[s];
        loss += residual * residual * inv_b;
        const double d3 = 2.0 * residual * inv_b;

        g.b3[0] += d3;
        for (std::size_t j = 0; j < h2; ++j) g.w3(0, j) += d3 * a2[j];

        for (std::size_t u = 0; u < h2; ++u) {
            // a2[u] > 0 iff the pre-activation was > 0; subgradient 0 at 0
            delta2[u] = a2[u] > 0.0 ? d3 * params.w3(0, u) : 0.0;
        }
        for (std::size_t u = 0; u < h2; ++u) {
            if (delta2[u] == 0.0) continue;
            g.b2[u] += delta2[u];
            double* gw2 = g.w2.data.data() + u * h1;
            for (std::size_t i = 0; i < h1; ++i) gw2[i] += delta2[u] * a1[i];
        }

        for (std::size_t i = 0; i < h1; ++i) {
            if (a1[i] <= 0.0) {
                delta1[i] = 0.0;
                continue;
            }
            double acc = 0.0;
            for (std::size_t u = 0; u < h2; ++u) acc += delta2[u] * params.w2(u, i);
            delta1[i] = acc;
        }
        for (std::size_t i = 0; i < h1; ++i) {
            if (delta1[i] == 0.0) continue;
            g.b1[i] += delta1[i];
            double* gw1 = g.w1.data.data() + i * in;
            for (std::size_t j = 0; j < in; ++j) gw1[j] += delta1[i] * x[j];
        }
    }
    return {std::move(g), loss};
}

std::pair<MlpParams, AdamState> adam_step(const MlpParams& params, const Gradients& grads,
                                          const AdamState& state) {
    MlpParams p = params;
    AdamState s = state;
    s.t = state.t + 1;

    const double b1 = s.beta1, b2 = s.beta2;
    const double corr1 = 1.0 - std::pow(b1, static_cast<double>(s.t));
    const double corr2 = 1.0 - std::pow(b2, static_cast<double>(s.t));

    auto pb = p.blocks();
    auto gb = grads.blocks();
    auto mb = s.m.blocks();
    auto vb = s.v.blocks();
    for (std::size_t k = 0; k < pb.size(); ++k) {
        auto theta = pb[k];
        auto g = gb[k];
        auto m = mb[k];
        auto v = vb[k];
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            const double m_hat = m[i] / corr1;
            const double v_hat = v[i] / corr2;
            theta[i] -= s.learning_rate * m_hat / (std::sqrt(v_hat) + s.epsilon);
        }
    }
    return {std::move(p), std::move(s)};
}

std::pair<MlpParams, LossHistory> train(const Matrix& x_train, const std::vector<double>& y_train,
                                        const Matrix& x_val, const std::vector<double>& y_val,
                                        const TrainConfig& config) {
    if (x_train.rows == 0) throw ValidationError("train: empty training set");
    if (x_train.rows != y_train.size()) {
        throw ValidationError("train: feature rows and target length differ");
    }
    if (config.epochs < 1 || config.batch_size < 1) {
        throw ValidationError("train: epochs and batch_size must be >= 1");
    }

    MlpParams params = init_params(config.seed, x_train.cols, config.hidden1, config.hidden2);
    AdamState state = AdamState::init(params, config.learning_rate);
    Rng shuffle_rng(derive_seed(config.seed, kShuffleStream));

    const std::size_t n = x_train.rows;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    LossHistory history;
    history.train_loss.reserve(config.epochs);
    history.val_loss.reserve(config.epochs);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double weighted_loss = 0.0;
        for (std::size_t start = 0; start < n; start += config.batch_size) {
            const std::size_t count = std::min(config.batch_size, n - start);
            const std::span<const std::size_t> batch_idx(order.data() + start, count);
            const Matrix bx = gather_rows(x_train, batch_idx);
            const std::vector<double> by = gather(y_train, batch_idx);
            auto [grads, batch_loss] = backward(params, bx, by);
            std::tie(params, state) = adam_step(params, grads, state);
            weighted_loss += batch_loss * static_cast<double>(count);
        }
        history.train_loss.push_back(weighted_loss / static_cast<double>(n));

        double val_loss = 0.0;
        if (x_val.rows > 0) {
            for (std::size_t i = 0; i < x_val.rows; ++i) {
                const double r = forward(params, x_val.row(i)).y_hat - y_val[i];
                val_loss += r * r;
            }
            val_loss /= static_cast<double>(x_val.rows);
        }
        history.val_loss.push_back(val_loss);
    }
    return {std::move(params), std::move(history)};
}

Matrix extract_features(const MlpParams& params, const Matrix& x) {
    Matrix f(x.rows, params.hidden2());
    for (std::size_t i = 0; i < x.rows; ++i) {
        const ForwardTrace t = forward(params, x.row(i));
        std::copy(t.a2.begin(), t.a2.end(), f.row(i).begin());
    }
    return f;
}

void save_model(const std::filesystem::path& path, const MlpParams& params,
                const TrainConfig& config, const ScalerStats& scaler) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model file: " + path.string());

    out.write(kModelMagic, sizeof(kModelMagic));
    write_pod(out, kModelVersion);
    write_pod(out, std::uint32_t{0});  // reserved

    write_pod(out, static_cast<std::uint64_t>(config.epochs));
    write_pod(out, static_cast<std::uint64_t>(config.batch_size));
    write_pod(out, config.learning_rate);
    write_pod(out, config.seed);
    write_pod(out, static_cast<std::uint64_t>(config.hidden1));
    write_pod(out, static_cast<std::uint64_t>(config.hidden2));

    write_pod(out, static_cast<std::uint64_t>(params.input_dim()));
    write_pod(out, static_cast<std::uint64_t>(params.hidden1()));
    write_pod(out, static_cast<std::uint64_t>(params.hidden2()));
    write_pod(out, std::uint64_t{1});

    for (auto block : params.blocks()) {
        out.write(reinterpret_cast<const char*>(block.data()),
                  static_cast<std::streamsize>(block.size() * sizeof(double)));
    }
    for (double v : scaler.mean) write_pod(out, v);
    for (double v : scaler.std) write_pod(out, v);
    if (!out) throw IoError("short write to model file: " + path.string());
}

SavedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path.string());

    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kModelMagic, sizeof(magic)) != 0) {
        throw ParseError("not a model file (bad magic): " + path.string());
    }
    std::uint32_t version = 0, reserved = 0;
    read_pod(in, version);
    read_pod(in, reserved);
    if (version != kModelVersion) {
        throw ParseError("unsupported model version " + std::to_string(version));
    }

    SavedModel m;
    std::uint64_t epochs{}, batch{}, h1c{}, h2c{};
    read_pod(in, epochs);
    read_pod(in, batch);
    read_pod(in, m.config.learning_rate);
    read_pod(in, m.config.seed);
    read_pod(in, h1c);
    read_pod(in, h2c);
    m.config.epochs = static_cast<std::size_t>(epochs);
    m.config.batch_size = static_cast<std::size_t>(batch);
    m.config.hidden1 = static_cast<std::size_t>(h1c);
    m.config.hidden2 = static_cast<std::size_t>(h2c);

    std::uint64_t in_dim{}, h1{}, h2{}, out_dim{};
    read_pod(in, in_dim);
    read_pod(in, h1);
    read_pod(in, h2);
    read_pod(in, out_dim);
    if (!in || out_dim != 1 || in_dim == 0 || h1 == 0 || h2 == 0) {
        throw ParseError("corrupt model header: " + path.string());
    }

    m.params.w1 = Matrix(h1, in_dim);
    m.params.w2 = Matrix(h2, h1);
    m.params.w3 = Matrix(1, h2);
    m.params.b1.assign(h1, 0.0);
    m.params.b2.assign(h2, 0.0);
    m.params.b3.assign(1, 0.0);
    for (auto block : m.params.blocks()) {
        in.read(reinterpret_cast<char*>(block.data()),
                static_cast<std::streamsize>(block.size() * sizeof(double)));
    }
    for (double& v : m.scaler.mean) read_pod(in, v);
    for (double& v : m.scaler.std) read_pod(in, v);
    if (!in) throw ParseError("truncated model file: " + path.string());
    return m;
}

}  // namespace nsai
