#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nsai/matrix.hpp"

namespace nsai {

struct TreeConfig {
    std::size_t max_depth = 4;
    std::size_t min_samples_leaf = 1;
    std::size_t min_samples_split = 2;
};

/// Node of a binary CART regression tree, stored pre-order in
/// RegressionTree::nodes. Internal nodes route rows with
/// value <= threshold to `left`; leaves have feature == -1.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;        // mean of the training targets routed here
    std::size_t sample_count = 0;

    bool is_leaf() const { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    std::size_t depth() const;       // edges on the longest root-to-leaf path
    std::size_t leaf_count() const;

    bool operator==(const RegressionTree&) const = default;
};

/// Greedy top-down CART fit. Split candidates are the midpoints between
/// consecutive distinct sorted values of each feature; the chosen split
/// minimizes the summed children SSE with ties broken by lowest feature
/// index, then lowest threshold. Growth stops at max_depth, pure nodes,
/// or the min-sample constraints. Deterministic.
RegressionTree fit_tree(const Matrix& features, std::span<const double> targets,
                        const TreeConfig& config = {});

double predict_tree(const RegressionTree& tree, std::span<const double> row);
std::vector<double> predict_tree(const RegressionTree& tree, const Matrix& rows);

/// Human-readable indented rules; doubles printed in shortest round-trip
/// form so export -> parse -> export is byte-identical. This text doubles
/// as the tree's persistence format (pre-order, two-space indent per
/// level, first child is the <= branch).
std::string export_rules(const RegressionTree& tree);
RegressionTree parse_rules(std::string_view text);

void save_tree(const std::filesystem::path& path, const RegressionTree& tree);
RegressionTree load_tree(const std::filesystem::path& path);

}  // namespace nsai
