#include "nsai/tree.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include "nsai/errors.hpp"
#include "nsai/text.hpp"

namespace nsai {

namespace {

struct SplitChoice {
    bool found = false;
    double sse = 0.0;
    int feature = -1;
    double threshold = 0.0;
};

// Midpoint, nudged down to the left value when rounding would land on (or
// past) the right value, so `<= threshold` always separates the two.
double split_threshold(double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    return mid < hi ? mid : lo;
}

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, std::span<const double> y, const TreeConfig& cfg)
        : x_(x), y_(y), cfg_(cfg) {}

    int build(std::vector<std::size_t> rows, std::size_t depth) {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();

        double sum = 0.0;
        for (std::size_t r : rows) sum += y_[r];
        tree_.nodes[id].value = sum / static_cast<double>(rows.size());
        tree_.nodes[id].sample_count = rows.size();

        if (depth >= cfg_.max_depth || rows.size() < cfg_.min_samples_split || pure(rows)) {
            return id;
        }
        const SplitChoice best = best_split(rows);
        if (!best.found) return id;

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : rows) {
            (x_(r, static_cast<std::size_t>(best.feature)) <= best.threshold ? left_rows
                                                                             : right_rows)
                .push_back(r);
        }
        if (left_rows.empty() || right_rows.empty()) return id;  // degenerate candidate

        tree_.nodes[id].feature = best.feature;
        tree_.nodes[id].threshold = best.threshold;
        rows.clear();
        rows.shrink_to_fit();
        const int left = build(std::move(left_rows), depth + 1);
        const int right = build(std::move(right_rows), depth + 1);
        tree_.nodes[id].left = left;
        tree_.nodes[id].right = right;
        return id;
    }

    RegressionTree take() { return std::move(tree_); }

private:
    bool pure(const std::vector<std::size_t>& rows) const {
        for (std::size_t r : rows) {
            if (y_[r] != y_[rows[0]]) return false;
        }
        return true;
    }

    // Scores every candidate with prefix sums of y and y^2 in per-feature
    // sorted order. Strict improvement plus ascending (feature, threshold)
    // iteration yields the documented tie-break.
    SplitChoice best_split(const std::vector<std::size_t>& rows) {
        const std::size_t n = rows.size();
        SplitChoice best;

        std::vector<std::size_t> order(rows);
        for (std::size_t f = 0; f < x_.cols; ++f) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const double va = x_(a, f), vb = x_(b, f);
                return va != vb ? va < vb : a < b;
            });

            double total_y = 0.0, total_y2 = 0.0;
            for (std::size_t r : order) {
                total_y += y_[r];
                total_y2 += y_[r] * y_[r];
            }

            double left_y = 0.0, left_y2 = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const double yi = y_[order[i]];
                left_y += yi;
                left_y2 += yi * yi;
                const double v = x_(order[i], f);
                const double v_next = x_(order[i + 1], f);
                if (v == v_next) continue;

                const std::size_t nl = i + 1, nr = n - nl;
                if (nl < cfg_.min_samples_leaf || nr < cfg_.min_samples_leaf) continue;

                const double right_y = total_y - left_y;
                const double right_y2 = total_y2 - left_y2;
                const double sse = (left_y2 - left_y * left_y / static_cast<double>(nl)) +
                                   (right_y2 - right_y * right_y / static_cast<double>(nr));
                if (!best.found || sse < best.sse) {
                    best.found = true;
                    best.sse = sse;
                    best.feature = static_cast<int>(f);
                    best.threshold = split_threshold(v, v_next);
                }
            }
        }
        return best;
    }

    const Matrix& x_;
    std::span<const double> y_;
    const TreeConfig& cfg_;
    RegressionTree tree_;
};

std::size_t subtree_depth(const RegressionTree& t, int id) {
    const TreeNode& n = t.nodes[static_cast<std::size_t>(id)];
    if (n.is_leaf()) return 0;
    return 1 + std::max(subtree_depth(t, n.left), subtree_depth(t, n.right));
}

void export_node(const RegressionTree& t, int id, std::size_t indent, std::string& out) {
    const TreeNode& n = t.nodes[static_cast<std::size_t>(id)];
    out.append(2 * indent, ' ');
    if (n.is_leaf()) {
        out += "predict " + fmt_double(n.value) + " (n=" + std::to_string(n.sample_count) + ")\n";
        return;
    }
    out += "if f" + std::to_string(n.feature) + " <= " + fmt_double(n.threshold) + ":\n";
    export_node(t, n.left, indent + 1, out);
    export_node(t, n.right, indent + 1, out);
}

struct RuleParser {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;

    std::size_t indent_of(std::string_view line) const {
        std::size_t k = 0;
        while (k < line.size() && line[k] == ' ') ++k;
        if (k % 2 != 0) throw ParseError("rules line " + std::to_string(pos + 1) +
                                         ": indentation must be a multiple of 2 spaces");
        return k / 2;
    }

    int parse_node(RegressionTree& tree, std::size_t depth) {
        if (pos >= lines.size()) {
            throw ParseError("rules: unexpected end of text at line " + std::to_string(pos + 1));
        }
        const std::string_view line = lines[pos];
        const std::string ctx = "rules line " + std::to_string(pos + 1);
        if (indent_of(line) != depth) {
            throw ParseError(ctx + ": expected indent " + std::to_string(depth));
        }
        const std::string_view body = line.substr(2 * depth);
        ++pos;

        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();

        if (body.starts_with("predict ")) {
            std::string_view rest = body.substr(8);
            const std::size_t open = rest.rfind(" (n=");
            if (open == std::string_view::npos || !rest.ends_with(")")) {
                throw ParseError(ctx + ": malformed leaf line");
            }
            tree.nodes[static_cast<std::size_t>(id)].value =
                parse_double(rest.substr(0, open), ctx);
            tree.nodes[static_cast<std::size_t>(id)].sample_count = static_cast<std::size_t>(
                parse_int(rest.substr(open + 4, rest.size() - open - 5), ctx));
            return id;
        }
        if (body.starts_with("if f") && body.ends_with(":")) {
            std::string_view rest = body.substr(4, body.size() - 5);
            const std::size_t sep = rest.find(" <= ");
            if (sep == std::string_view::npos) throw ParseError(ctx + ": malformed condition");
            const long long feature = parse_int(rest.substr(0, sep), ctx);
            if (feature < 0) throw ParseError(ctx + ": negative feature index");
            const double threshold = parse_double(rest.substr(sep + 4), ctx);
            const int left = parse_node(tree, depth + 1);
            const int right = parse_node(tree, depth + 1);
            TreeNode& n = tree.nodes[static_cast<std::size_t>(id)];
            n.feature = static_cast<int>(feature);
            n.threshold = threshold;
            n.left = left;
            n.right = right;
            return id;
        }
        throw ParseError(ctx + ": expected 'if f...' or 'predict ...'");
    }
};

}  // namespace

std::size_t RegressionTree::depth() const {
    if (nodes.empty()) return 0;
    return subtree_depth(*this, 0);
}

std::size_t RegressionTree::leaf_count() const {
    std::size_t k = 0;
    for (const auto& n : nodes) k += n.is_leaf() ? 1 : 0;
    return k;
}

RegressionTree fit_tree(const Matrix& features, std::span<const double> targets,
                        const TreeConfig& config) {
    if (features.rows == 0) throw ValidationError("fit_tree: empty input");
    if (features.rows != targets.size()) {
        throw ValidationError("fit_tree: feature rows and target length differ");
    }
    if (config.min_samples_leaf < 1) {
        throw ValidationError("fit_tree: min_samples_leaf must be >= 1");
    }

    std::vector<std::size_t> rows(features.rows);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    TreeBuilder builder(features, targets, config);
    builder.build(std::move(rows), 0);
    return builder.take();
}

double predict_tree(const RegressionTree& tree, std::span<const double> row) {
    if (tree.nodes.empty()) throw ValidationError("predict_tree: empty tree");
    int id = 0;
    while (!tree.nodes[static_cast<std::size_t>(id)].is_leaf()) {
        const TreeNode& n = tree.nodes[static_cast<std::size_t>(id)];
        id = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return tree.nodes[static_cast<std::size_t>(id)].value;
}

std::vector<double> predict_tree(const RegressionTree& tree, const Matrix& rows) {
    std::vector<double> out;
    out.reserve(rows.rows);
    for (std::size_t i = 0; i < rows.rows; ++i) out.push_back(predict_tree(tree, rows.row(i)));
    return out;
}

std::string export_rules(const RegressionTree& tree) {
    if (tree.nodes.empty()) throw ValidationError("export_rules: empty tree");
    std::string out;
    export_node(tree, 0, 0, out);
    return out;
}

RegressionTree parse_rules(std::string_view text) {
    RuleParser parser{split_lines(text)};
    if (parser.lines.empty()) throw ParseError("rules: empty text");
    RegressionTree tree;
    parser.parse_node(tree, 0);
    if (parser.pos != parser.lines.size()) {
        throw ParseError("rules: trailing content at line " + std::to_string(parser.pos + 1));
    }
    return tree;
}

void save_tree(const std::filesystem::path& path, const RegressionTree& tree) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write tree file: " + path.string());
    out << export_rules(tree);
}

RegressionTree load_tree(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open tree file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_rules(buf.str());
}

}  // namespace nsai
