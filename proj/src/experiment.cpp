#include "nsai/experiment.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "nsai/errors.hpp"
#include "nsai/text.hpp"

namespace nsai {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("short write: " + path.string());
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return s;
}

ModelReport make_report(std::string algorithm, const PreparedData& data,
                        std::span<const double> pred_train, std::span<const double> pred_val) {
    ModelReport r;
    r.algorithm = std::move(algorithm);
    r.mse_train = mse(data.y_train, pred_train);
    r.mse_val = mse(data.y_val, pred_val);
    r.r2_train = r2(data.y_train, pred_train);
    r.r2_val = r2(data.y_val, pred_val);
    return r;
}

TrainConfig resolved_train_config(const ExperimentConfig& cfg, std::uint64_t seed) {
    TrainConfig tc = cfg.train;
    tc.seed = seed;
    return tc;
}

ModelRun evaluate_simple_ann(const PreparedData& data, const MlpParams& params,
                             const LossHistory& history, const TrainConfig& tc) {
    ModelRun run;
    run.params = params;
    run.history = history;
    run.train_config = tc;
    run.pred_train = predict(params, data.x_train);
    run.pred_val = predict(params, data.x_val);
    run.report = make_report("simple_ann", data, run.pred_train, run.pred_val);
    return run;
}

ModelRun evaluate_neurosymbolic(const PreparedData& data, const MlpParams& params,
                                const LossHistory& history, const TrainConfig& tc,
                                const TreeConfig& tree_cfg) {
    ModelRun run;
    run.params = params;
    run.history = history;
    run.train_config = tc;
    const Matrix f_train = extract_features(params, data.x_train);
    const Matrix f_val = extract_features(params, data.x_val);
    run.tree = fit_tree(f_train, data.y_train, tree_cfg);
    run.pred_train = predict_tree(*run.tree, f_train);
    run.pred_val = predict_tree(*run.tree, f_val);
    run.report = make_report("neurosymbolic", data, run.pred_train, run.pred_val);
    return run;
}

void write_run_artifacts(const ExperimentConfig& cfg, const PreparedData& data,
                         const ModelRun& run, const std::string& loss_history_name) {
    const auto& dir = cfg.output_dir;
    ensure_dir(dir);
    save_model(dir / ("model_" + run.report.algorithm + ".bin"), run.params, run.train_config,
               data.scaler);
    write_loss_history_csv(dir / loss_history_name, run.history);
    write_pred_csv(dir / ("pred_train_" + run.report.algorithm + ".csv"), data.y_train,
                   run.pred_train);
    write_pred_csv(dir / ("pred_val_" + run.report.algorithm + ".csv"), data.y_val, run.pred_val);
    if (run.tree) save_tree(dir / "tree_rules.txt", *run.tree);
    save_dataset(dir / "augmented.csv", data.augmented);
    write_manifest(dir, cfg, data.dataset_hash);
}

}  // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::simple_ann: return "simple_ann";
        case ModelKind::neurosymbolic: return "neurosymbolic";
        case ModelKind::both: return "both";
    }
    return "both";
}

ModelKind model_kind_from_string(const std::string& text) {
    if (text == "simple_ann") return ModelKind::simple_ann;
    if (text == "neurosymbolic") return ModelKind::neurosymbolic;
    if (text == "both") return ModelKind::both;
    throw ValidationError("unknown model kind '" + text +
                          "' (expected simple_ann, neurosymbolic, or both)");
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ParseError("config " + path.string() + ": " + e.what());
    }

    ExperimentConfig cfg;
    try {
        if (j.contains("data_path")) cfg.data_path = j["data_path"].get<std::string>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
        if (j.contains("model_kind")) {
            cfg.model_kind = model_kind_from_string(j["model_kind"].get<std::string>());
        }
        if (j.contains("shared_network")) cfg.shared_network = j["shared_network"].get<bool>();

        if (j.contains("augment")) {
            const auto& a = j["augment"];
            if (a.contains("target_size")) cfg.augment.target_size = a["target_size"].get<std::size_t>();
            if (a.contains("noise_scale")) cfg.augment.noise_scale = a["noise_scale"].get<double>();
            if (a.contains("clamp")) cfg.augment.clamp = a["clamp"].get<bool>();
            if (a.contains("seed")) cfg.augment_seed = a["seed"].get<std::uint64_t>();
        }
        if (j.contains("split")) {
            const auto& s = j["split"];
            if (s.contains("train_fraction")) cfg.split.train_fraction = s["train_fraction"].get<double>();
            if (s.contains("split_first")) cfg.split.split_first = s["split_first"].get<bool>();
            if (s.contains("seed")) cfg.split_seed = s["seed"].get<std::uint64_t>();
        }
        if (j.contains("train")) {
            const auto& t = j["train"];
            if (t.contains("epochs")) cfg.train.epochs = t["epochs"].get<std::size_t>();
            if (t.contains("batch_size")) cfg.train.batch_size = t["batch_size"].get<std::size_t>();
            if (t.contains("learning_rate")) cfg.train.learning_rate = t["learning_rate"].get<double>();
            if (t.contains("hidden1")) cfg.train.hidden1 = t["hidden1"].get<std::size_t>();
            if (t.contains("hidden2")) cfg.train.hidden2 = t["hidden2"].get<std::size_t>();
            if (t.contains("seed")) cfg.train_seed = t["seed"].get<std::uint64_t>();
        }
        if (j.contains("tree")) {
            const auto& t = j["tree"];
            if (t.contains("max_depth")) cfg.tree.max_depth = t["max_depth"].get<std::size_t>();
            if (t.contains("min_samples_leaf")) cfg.tree.min_samples_leaf = t["min_samples_leaf"].get<std::size_t>();
            if (t.contains("min_samples_split")) cfg.tree.min_samples_split = t["min_samples_split"].get<std::size_t>();
        }
    } catch (const json::exception& e) {
        throw ParseError("config " + path.string() + ": " + e.what());
    }
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["data_path"] = cfg.data_path.generic_string();
    j["seed"] = cfg.seed;
    j["output_dir"] = cfg.output_dir.generic_string();
    j["model_kind"] = to_string(cfg.model_kind);
    j["shared_network"] = cfg.shared_network;
    j["augment"] = {{"target_size", cfg.augment.target_size},
                    {"noise_scale", cfg.augment.noise_scale},
                    {"clamp", cfg.augment.clamp},
                    {"seed", cfg.effective_augment_seed()}};
    j["split"] = {{"train_fraction", cfg.split.train_fraction},
                  {"split_first", cfg.split.split_first},
                  {"seed", cfg.effective_split_seed()}};
    j["train"] = {{"epochs", cfg.train.epochs},
                  {"batch_size", cfg.train.batch_size},
                  {"learning_rate", cfg.train.learning_rate},
                  {"hidden1", cfg.train.hidden1},
                  {"hidden2", cfg.train.hidden2},
                  {"seed", cfg.effective_train_seed()}};
    j["tree"] = {{"max_depth", cfg.tree.max_depth},
                 {"min_samples_leaf", cfg.tree.min_samples_leaf},
                 {"min_samples_split", cfg.tree.min_samples_split}};
    return j.dump(2) + "\n";
}

void validate_config(const ExperimentConfig& cfg) {
    if (!std::filesystem::exists(cfg.data_path)) {
        throw IoError("data file not found: " + cfg.data_path.string());
    }
    if (!(cfg.split.train_fraction > 0.0 && cfg.split.train_fraction < 1.0)) {
        throw ValidationError("split.train_fraction must lie in (0, 1)");
    }
    if (cfg.train.epochs < 1) throw ValidationError("train.epochs must be >= 1");
    if (cfg.train.batch_size < 1) throw ValidationError("train.batch_size must be >= 1");
    if (cfg.train.hidden1 < 1 || cfg.train.hidden2 < 1) {
        throw ValidationError("hidden layer widths must be >= 1");
    }
    if (cfg.augment.noise_scale < 0.0) throw ValidationError("augment.noise_scale must be >= 0");
    if (cfg.tree.min_samples_leaf < 1) throw ValidationError("tree.min_samples_leaf must be >= 1");
}

PreparedData prepare_data(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const std::string raw = read_file(cfg.data_path);
    PreparedData out;
    out.dataset_hash = fnv1a64(raw);
    const Dataset original = parse_dataset(raw);
    out.n_original = original.size();

    AugmentConfig aug = cfg.augment;
    aug.seed = cfg.effective_augment_seed();

    if (!cfg.split.split_first) {
        // Mirror the described order: expand first, then split. Synthetic
        // children of one source row can land on both sides; use
        // split_first to avoid that leakage.
        out.augmented = augment_tabular(original, aug);
        const TrainValSplit sp =
            split(out.augmented, cfg.split.train_fraction, cfg.effective_split_seed());
        out.scaler = compute_scaler(out.augmented, sp.train_indices);
        const Dataset scaled = apply_scaler(out.augmented, out.scaler);
        const Matrix features = scaled.features();
        const std::vector<double> targets = scaled.targets();
        out.x_train = gather_rows(features, sp.train_indices);
        out.x_val = gather_rows(features, sp.val_indices);
        out.y_train = gather(targets, sp.train_indices);
        out.y_val = gather(targets, sp.val_indices);
        return out;
    }

    // Split the originals, then augment each side independently so no
    // synthetic row descends from an original on the other side.
    const TrainValSplit sp = split(original, cfg.split.train_fraction, cfg.effective_split_seed());
    Dataset train_src, val_src;
    train_src.feature_names = original.feature_names;
    val_src.feature_names = original.feature_names;
    for (std::size_t i : sp.train_indices) train_src.records.push_back(original.records[i]);
    for (std::size_t i : sp.val_indices) val_src.records.push_back(original.records[i]);

    const auto train_target = static_cast<std::size_t>(std::llround(
        cfg.split.train_fraction * static_cast<double>(aug.target_size)));
    const std::size_t val_target = aug.target_size - train_target;
    if (train_target < train_src.size() || val_target < val_src.size()) {
        throw ValidationError("split-first augmentation targets smaller than source sides");
    }

    AugmentConfig train_aug = aug;
    train_aug.target_size = train_target;
    train_aug.seed = derive_seed(aug.seed, 1);
    AugmentConfig val_aug = aug;
    val_aug.target_size = val_target;
    val_aug.seed = derive_seed(aug.seed, 2);

    const Dataset train_ds = augment_tabular(train_src, train_aug);
    const Dataset val_ds = augment_tabular(val_src, val_aug);

    out.augmented.feature_names = original.feature_names;
    out.augmented.records = train_ds.records;
    out.augmented.records.insert(out.augmented.records.end(), val_ds.records.begin(),
                                 val_ds.records.end());

    std::vector<std::size_t> train_rows(train_ds.size());
    std::iota(train_rows.begin(), train_rows.end(), std::size_t{0});
    out.scaler = compute_scaler(train_ds, train_rows);

    const Dataset train_scaled = apply_scaler(train_ds, out.scaler);
    const Dataset val_scaled = apply_scaler(val_ds, out.scaler);
    out.x_train = train_scaled.features();
    out.x_val = val_scaled.features();
    out.y_train = train_scaled.targets();
    out.y_val = val_scaled.targets();
    return out;
}

ModelRun run_simple_ann(const ExperimentConfig& cfg) {
    const PreparedData data = prepare_data(cfg);
    const TrainConfig tc = resolved_train_config(cfg, cfg.effective_train_seed());
    auto [params, history] = train(data.x_train, data.y_train, data.x_val, data.y_val, tc);
    ModelRun run = evaluate_simple_ann(data, params, history, tc);
    write_run_artifacts(cfg, data, run, "loss_history.csv");
    return run;
}

ModelRun run_neurosymbolic(const ExperimentConfig& cfg) {
    const PreparedData data = prepare_data(cfg);
    const TrainConfig tc = resolved_train_config(cfg, cfg.effective_train_seed());
    auto [params, history] = train(data.x_train, data.y_train, data.x_val, data.y_val, tc);
    ModelRun run = evaluate_neurosymbolic(data, params, history, tc, cfg.tree);
    write_run_artifacts(cfg, data, run, "loss_history.csv");
    return run;
}

CompareResult compare(const ExperimentConfig& cfg) {
    const PreparedData data = prepare_data(cfg);
    const TrainConfig tc = resolved_train_config(cfg, cfg.effective_train_seed());
    auto [params, history] = train(data.x_train, data.y_train, data.x_val, data.y_val, tc);

    CompareResult result;
    result.simple_ann = evaluate_simple_ann(data, params, history, tc);
    if (cfg.shared_network) {
        result.neurosymbolic = evaluate_neurosymbolic(data, params, history, tc, cfg.tree);
    } else {
        const TrainConfig tc2 = resolved_train_config(cfg, derive_seed(tc.seed, 1));
        auto [params2, history2] =
            train(data.x_train, data.y_train, data.x_val, data.y_val, tc2);
        result.neurosymbolic = evaluate_neurosymbolic(data, params2, history2, tc2, cfg.tree);
    }

    const auto& dir = cfg.output_dir;
    ensure_dir(dir);
    write_comparison_csv(dir / "comparison.csv",
                         {result.simple_ann.report, result.neurosymbolic.report});
    if (cfg.shared_network) {
        save_model(dir / "model.bin", params, tc, data.scaler);
        write_loss_history_csv(dir / "loss_history.csv", history);
    } else {
        save_model(dir / "model_simple_ann.bin", result.simple_ann.params, tc, data.scaler);
        save_model(dir / "model_neurosymbolic.bin", result.neurosymbolic.params,
                   result.neurosymbolic.train_config, data.scaler);
        write_loss_history_csv(dir / "loss_history_simple_ann.csv", result.simple_ann.history);
        write_loss_history_csv(dir / "loss_history_neurosymbolic.csv",
                               result.neurosymbolic.history);
    }
    for (const ModelRun* run : {&result.simple_ann, &result.neurosymbolic}) {
        write_pred_csv(dir / ("pred_train_" + run->report.algorithm + ".csv"), data.y_train,
                       run->pred_train);
        write_pred_csv(dir / ("pred_val_" + run->report.algorithm + ".csv"), data.y_val,
                       run->pred_val);
    }
    save_tree(dir / "tree_rules.txt", *result.neurosymbolic.tree);
    save_dataset(dir / "augmented.csv", data.augmented);
    write_manifest(dir, cfg, data.dataset_hash);
    return result;
}

std::string winner_summary(const ModelReport& simple_ann, const ModelReport& neurosymbolic) {
    struct Entry {
        const char* name;
        double a, b;
        bool lower_wins;
    };
    const Entry entries[] = {
        {"mse_train", simple_ann.mse_train, neurosymbolic.mse_train, true},
        {"mse_val", simple_ann.mse_val, neurosymbolic.mse_val, true},
        {"r2_train", simple_ann.r2_train, neurosymbolic.r2_train, false},
        {"r2_val", simple_ann.r2_val, neurosymbolic.r2_val, false},
    };
    std::string out;
    for (const auto& e : entries) {
        const char* winner = "tie";
        if (e.a != e.b) {
            const bool ann_wins = e.lower_wins ? e.a < e.b : e.a > e.b;
            winner = ann_wins ? "simple_ann" : "neurosymbolic";
        }
        out += std::string(e.name) + ": " + winner + " (simple_ann=" + fmt_double(e.a) +
               ", neurosymbolic=" + fmt_double(e.b) + ")\n";
    }
    return out;
}

void write_loss_history_csv(const std::filesystem::path& path, const LossHistory& history) {
    std::string out = "epoch,train_loss,val_loss\n";
    for (std::size_t e = 0; e < history.train_loss.size(); ++e) {
        out += std::to_string(e + 1) + "," + fmt_double(history.train_loss[e]) + "," +
               fmt_double(history.val_loss[e]) + "\n";
    }
    write_file(path, out);
}

void write_pred_csv(const std::filesystem::path& path, std::span<const double> y_true,
                    std::span<const double> y_pred) {
    std::string out = "true,predicted\n";
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        out += fmt_double(y_true[i]) + "," + fmt_double(y_pred[i]) + "\n";
    }
    write_file(path, out);
}

void write_comparison_csv(const std::filesystem::path& path,
                          const std::vector<ModelReport>& reports) {
    std::string out = std::string(kReportCsvHeader) + "\n";
    for (const auto& r : reports) out += report_csv_row(r) + "\n";
    write_file(path, out);
}

void write_sine_demo_csv(const std::filesystem::path& out_dir, const SineDemoResult& demo) {
    ensure_dir(out_dir);
    auto dump = [](const std::vector<XyPoint>& pts) {
        std::string out = "x,y\n";
        for (const auto& p : pts) out += fmt_double(p.x) + "," + fmt_double(p.y) + "\n";
        return out;
    };
    write_file(out_dir / "sine_demo_original.csv", dump(demo.original));
    write_file(out_dir / "sine_demo_synthetic.csv", dump(demo.synthetic));
}

void write_manifest(const std::filesystem::path& out_dir, const ExperimentConfig& cfg,
                    std::uint64_t dataset_hash) {
    ensure_dir(out_dir);
    json j;
    j["version"] = kVersion;
    j["seed"] = cfg.seed;
    j["dataset_hash"] = "fnv1a64:" + hex64(dataset_hash);
    j["config"] = json::parse(config_to_json(cfg));
    write_file(out_dir / "manifest.json", j.dump(2) + "\n");
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace nsai
