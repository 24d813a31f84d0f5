#pragma once

// Brute-force CART oracle: exhaustively scores every (feature, midpoint
// threshold) split at each node with direct two-pass SSE computation.
// Shares only the documented split rules with the library (midpoint
// placement, <= routing, lowest-feature/lowest-threshold tie-break),
// none of its prefix-sum machinery.

#include <algorithm>
#include <cstddef>
#include <memory>
#include <vector>

#include "nsai/matrix.hpp"
#include "nsai/tree.hpp"

namespace nsai_test {

struct OracleNode {
    int feature = -1;
    double threshold = 0.0;
    std::unique_ptr<OracleNode> left, right;
    double value = 0.0;
    std::size_t count = 0;
};

class TreeOracle {
public:
    TreeOracle(const nsai::Matrix& x, const std::vector<double>& y, const nsai::TreeConfig& cfg)
        : x_(x), y_(y), cfg_(cfg) {}

    std::unique_ptr<OracleNode> fit() {
        std::vector<std::size_t> rows(x_.rows);
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
        return build(rows, 0);
    }

    static double predict(const OracleNode& node, std::span<const double> row) {
        const OracleNode* n = &node;
        while (n->feature >= 0) {
            n = row[static_cast<std::size_t>(n->feature)] <= n->threshold ? n->left.get()
                                                                          : n->right.get();
        }
        return n->value;
    }

private:
    static double mean_of(const std::vector<double>& y, const std::vector<std::size_t>& rows) {
        double sum = 0.0;
        for (std::size_t r : rows) sum += y[r];
        return sum / static_cast<double>(rows.size());
    }

    double side_sse(const std::vector<std::size_t>& rows) const {
        const double m = mean_of(y_, rows);
        double sse = 0.0;
        for (std::size_t r : rows) sse += (y_[r] - m) * (y_[r] - m);
        return sse;
    }

    std::unique_ptr<OracleNode> build(const std::vector<std::size_t>& rows, std::size_t depth) {
        auto node = std::make_unique<OracleNode>();
        node->value = mean_of(y_, rows);
        node->count = rows.size();

        bool pure = true;
        for (std::size_t r : rows) pure = pure && y_[r] == y_[rows[0]];
        if (depth >= cfg_.max_depth || rows.size() < cfg_.min_samples_split || pure) return node;

        bool found = false;
        double best_sse = 0.0;
        int best_feature = -1;
        double best_threshold = 0.0;
        for (std::size_t f = 0; f < x_.cols; ++f) {
            std::vector<double> values;
            values.reserve(rows.size());
            for (std::size_t r : rows) values.push_back(x_(r, f));
            std::sort(values.begin(), values.end());
            values.erase(std::unique(values.begin(), values.end()), values.end());

            for (std::size_t k = 0; k + 1 < values.size(); ++k) {
                double t = 0.5 * (values[k] + values[k + 1]);
                if (t >= values[k + 1]) t = values[k];  // adjacent doubles

                std::vector<std::size_t> left, right;
                for (std::size_t r : rows) (x_(r, f) <= t ? left : right).push_back(r);
                if (left.size() < cfg_.min_samples_leaf || right.size() < cfg_.min_samples_leaf ||
                    left.empty() || right.empty()) {
                    continue;
                }
                const double sse = side_sse(left) + side_sse(right);
                if (!found || sse < best_sse) {
                    found = true;
                    best_sse = sse;
                    best_feature = static_cast<int>(f);
                    best_threshold = t;
                }
            }
        }
        if (!found) return node;

        std::vector<std::size_t> left, right;
        for (std::size_t r : rows) {
            (x_(r, static_cast<std::size_t>(best_feature)) <= best_threshold ? left : right)
                .push_back(r);
        }
        node->feature = best_feature;
        node->threshold = best_threshold;
        node->left = build(left, depth + 1);
        node->right = build(right, depth + 1);
        return node;
    }

    const nsai::Matrix& x_;
    const std::vector<double>& y_;
    nsai::TreeConfig cfg_;
};

// Training SSE of either tree kind through one shared evaluator.
inline double tree_training_sse(const nsai::RegressionTree& tree, const nsai::Matrix& x,
                                const std::vector<double>& y) {
    double sse = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        const double r = nsai::predict_tree(tree, x.row(i)) - y[i];
        sse += r * r;
    }
    return sse;
}

inline double oracle_training_sse(const OracleNode& root, const nsai::Matrix& x,
                                  const std::vector<double>& y) {
    double sse = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        const double r = TreeOracle::predict(root, x.row(i)) - y[i];
        sse += r * r;
    }
    return sse;
}

}  // namespace nsai_test
