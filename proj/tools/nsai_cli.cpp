// Command-line harness for the neurosymbolic impact-strength experiments.
//
// Exit codes: 0 success, 1 usage error, 2 data/validation/IO error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nsai/errors.hpp"
#include "nsai/experiment.hpp"
#include "nsai/text.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string data_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> model;
    bool split_first = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON experiment config");
    cmd->add_option("--data", flags.data_path, "dataset CSV (overrides config)");
    cmd->add_option("--seed", flags.seed, "master seed (overrides config)");
    cmd->add_option("--out-dir", flags.out_dir, "output directory (overrides config)");
    cmd->add_option("--model", flags.model, "simple_ann | neurosymbolic | both")
        ->check(CLI::IsMember({"simple_ann", "neurosymbolic", "both"}));
    cmd->add_flag("--split-first", flags.split_first,
                  "split the originals before augmenting (avoids leakage)");
}

nsai::ExperimentConfig resolve_config(const CommonFlags& flags) {
    nsai::ExperimentConfig cfg;
    if (!flags.config_path.empty()) cfg = nsai::load_config(flags.config_path);
    if (!flags.data_path.empty()) cfg.data_path = flags.data_path;
    if (flags.seed) cfg.seed = *flags.seed;
    if (!flags.out_dir.empty()) cfg.output_dir = flags.out_dir;
    if (flags.model) cfg.model_kind = nsai::model_kind_from_string(*flags.model);
    if (flags.split_first) cfg.split.split_first = true;
    if (const char* env = std::getenv("NSAI_OUT_DIR"); env && *env) cfg.output_dir = env;
    return cfg;
}

void print_report(const nsai::ModelReport& r) {
    std::cout << r.algorithm << ": mse_train=" << nsai::fmt_double(r.mse_train)
              << " mse_val=" << nsai::fmt_double(r.mse_val)
              << " r2_train=" << nsai::fmt_double(r.r2_train)
              << " r2_val=" << nsai::fmt_double(r.r2_val) << "\n";
}

int cmd_train(const CommonFlags& flags) {
    const auto cfg = resolve_config(flags);
    switch (cfg.model_kind) {
        case nsai::ModelKind::simple_ann:
            print_report(nsai::run_simple_ann(cfg).report);
            break;
        case nsai::ModelKind::neurosymbolic:
            print_report(nsai::run_neurosymbolic(cfg).report);
            break;
        case nsai::ModelKind::both: {
            const auto result = nsai::compare(cfg);
            print_report(result.simple_ann.report);
            print_report(result.neurosymbolic.report);
            break;
        }
    }
    std::cout << "artifacts written to " << cfg.output_dir.string() << "\n";
    return 0;
}

int cmd_compare(CommonFlags flags) {
    flags.model = "both";
    const auto cfg = resolve_config(flags);
    const auto result = nsai::compare(cfg);
    print_report(result.simple_ann.report);
    print_report(result.neurosymbolic.report);
    std::cout << nsai::winner_summary(result.simple_ann.report, result.neurosymbolic.report);
    std::cout << "artifacts written to " << cfg.output_dir.string() << "\n";
    return 0;
}

int cmd_sine_demo(std::size_t n_original, std::size_t n_synthetic, double noise_sd,
                  std::uint64_t seed, std::string out_dir) {
    if (const char* env = std::getenv("NSAI_OUT_DIR"); env && *env) out_dir = env;
    const auto demo = nsai::sine_demo(n_original, n_synthetic, noise_sd, seed);
    nsai::write_sine_demo_csv(out_dir, demo);
    std::cout << "wrote " << demo.original.size() << " original and " << demo.synthetic.size()
              << " synthetic points to " << out_dir << "\n";
    return 0;
}

int cmd_export_rules(const std::string& tree_path, const CommonFlags& flags) {
    if (!tree_path.empty()) {
        const auto tree = nsai::load_tree(tree_path);
        std::cout << nsai::export_rules(tree);
        return 0;
    }
    const auto cfg = resolve_config(flags);
    const auto run = nsai::run_neurosymbolic(cfg);
    std::cout << nsai::export_rules(*run.tree);
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& tree_path, const std::string& out_path) {
    const nsai::SavedModel model = nsai::load_model(model_path);
    const nsai::Dataset ds = nsai::load_dataset(data_path);
    const nsai::Dataset scaled = nsai::apply_scaler(ds, model.scaler);
    const nsai::Matrix x = scaled.features();

    std::vector<double> preds;
    if (!tree_path.empty()) {
        const auto tree = nsai::load_tree(tree_path);
        preds = nsai::predict_tree(tree, nsai::extract_features(model.params, x));
    } else {
        preds = nsai::predict(model.params, x);
    }

    std::string out = "true,predicted\n";
    const auto targets = ds.targets();
    for (std::size_t i = 0; i < preds.size(); ++i) {
        out += nsai::fmt_double(targets[i]) + "," + nsai::fmt_double(preds[i]) + "\n";
    }
    if (out_path.empty()) {
        std::cout << out;
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw nsai::IoError("cannot write predictions file: " + out_path);
        f << out;
        std::cout << "wrote " << preds.size() << " predictions to " << out_path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neurosymbolic impact-strength regression experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", nsai::kVersion);

    CommonFlags train_flags, compare_flags, rules_flags;

    auto* train_cmd = app.add_subcommand("train", "train and evaluate the configured model(s)");
    add_common_flags(train_cmd, train_flags);

    auto* compare_cmd =
        app.add_subcommand("compare", "benchmark simple_ann vs neurosymbolic on one split");
    add_common_flags(compare_cmd, compare_flags);

    std::size_t sine_n_original = 30, sine_n_synthetic = 500;
    double sine_noise_sd = 0.1;
    std::uint64_t sine_seed = 42;
    std::string sine_out_dir = "out";
    auto* sine_cmd = app.add_subcommand("sine-demo", "export the sine augmentation demo CSVs");
    sine_cmd->add_option("--n-original", sine_n_original, "original grid points");
    sine_cmd->add_option("--n-synthetic", sine_n_synthetic, "synthetic points");
    sine_cmd->add_option("--noise-sd", sine_noise_sd, "Gaussian noise std");
    sine_cmd->add_option("--seed", sine_seed, "seed");
    sine_cmd->add_option("--out-dir", sine_out_dir, "output directory");

    std::string rules_tree_path;
    auto* rules_cmd = app.add_subcommand("export-rules", "print a fitted tree as if/else rules");
    rules_cmd->add_option("--tree", rules_tree_path, "existing tree rules file to print");
    add_common_flags(rules_cmd, rules_flags);

    std::string predict_model, predict_data, predict_tree_path, predict_out;
    auto* predict_cmd = app.add_subcommand("predict", "predict with a saved model");
    predict_cmd->add_option("--model-file", predict_model, "saved model (.bin)")->required();
    predict_cmd->add_option("--data", predict_data, "dataset CSV to predict on")->required();
    predict_cmd->add_option("--tree", predict_tree_path,
                            "tree rules file (predict via the symbolic head)");
    predict_cmd->add_option("--out", predict_out, "output CSV (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (train_cmd->parsed()) return cmd_train(train_flags);
        if (compare_cmd->parsed()) return cmd_compare(compare_flags);
        if (sine_cmd->parsed()) {
            return cmd_sine_demo(sine_n_original, sine_n_synthetic, sine_noise_sd, sine_seed,
                                 sine_out_dir);
        }
        if (rules_cmd->parsed()) return cmd_export_rules(rules_tree_path, rules_flags);
        if (predict_cmd->parsed()) {
            return cmd_predict(predict_model, predict_data, predict_tree_path, predict_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
