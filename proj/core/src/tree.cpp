#include "epforest/tree.hpp"

#include "epforest/errors.hpp"
#include "epforest/random.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace epf {

namespace {

using json = nlohmann::json;

// Split search over explicit row indices. Rows may repeat (bootstrap bags).
class Grower {
public:
    Grower(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const TreeOptions& options,
           std::mt19937_64& rng)
        : x_(X), y_(y), options_(options), rng_(rng), p_(int(X.cols())) {
        mtry_ = options.features_per_split > 0 ? options.features_per_split
                                               : std::max(1, p_ / 3);
        if (mtry_ > p_)
            throw ConfigError("features_per_split " + std::to_string(mtry_) + " exceeds " +
                              std::to_string(p_) + " features");
        if (options.min_node_size < 2) throw ConfigError("min_node_size must be at least 2");
    }

    RegressionTree grow(std::vector<int> rows) {
        tree_.feature_count = p_;
        tree_.impurity_tally.assign(std::size_t(p_), 0.0);
        grow_node(std::move(rows), 0);
        return std::move(tree_);
    }

    std::optional<SplitDecision> search(const std::vector<int>& rows,
                                        const std::vector<int>& features) const {
        const std::size_t k = rows.size();
        if (k < 2) return std::nullopt;

        // Pure nodes cannot be improved.
        const double y0 = y_[rows[0]];
        bool pure = true;
        double parent_sum = 0.0;
        for (const int r : rows) {
            parent_sum += y_[r];
            if (y_[r] != y0) pure = false;
        }
        if (pure) return std::nullopt;
        const double parent_term = parent_sum * parent_sum / double(k);

        SplitDecision best;
        std::vector<std::pair<double, double>> vals(k); // (x, y) sorted by x
        for (const int f : features) {
            for (std::size_t i = 0; i < k; ++i)
                vals[i] = {x_(rows[i], f), y_[rows[i]]};
            std::sort(vals.begin(), vals.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            double left_sum = 0.0;
            for (std::size_t i = 0; i + 1 < k; ++i) {
                left_sum += vals[i].second;
                const double lo = vals[i].first;
                const double hi = vals[i + 1].first;
                if (!(hi > lo)) continue;
                const double nl = double(i + 1);
                const double nr = double(k - i - 1);
                const double right_sum = parent_sum - left_sum;
                const double reduction =
                    left_sum * left_sum / nl + right_sum * right_sum / nr - parent_term;
                // Candidates within 1e-12 relative are mathematical ties
                // (e.g. the same partition reachable through two features);
                // scan order then keeps the lowest feature and threshold.
                if (reduction > best.sse_reduction * (1.0 + 1e-12)) {
                    double mid = lo + (hi - lo) * 0.5;
                    if (!(mid < hi)) mid = lo; // adjacent floats: keep the partition exact
                    best = {f, mid, reduction, int(i + 1), int(k - i - 1)};
                }
            }
        }
        if (best.feature < 0 || !(best.sse_reduction > 0.0)) return std::nullopt;
        return best;
    }

private:
    int grow_node(std::vector<int> rows, int depth) {
        const int id = int(tree_.nodes.size());
        tree_.nodes.emplace_back();
        const std::size_t k = rows.size();

        double sum = 0.0;
        for (const int r : rows) sum += y_[r];
        tree_.nodes[id].count = int(k);
        tree_.nodes[id].prediction = sum / double(k);

        const bool eligible = int(k) >= options_.min_node_size &&
                              (options_.max_depth == 0 || depth < options_.max_depth);
        if (!eligible) return id;

        const auto split = search(rows, sample_features());
        if (!split) return id;

        tree_.impurity_tally[std::size_t(split->feature)] += split->sse_reduction;
        tree_.nodes[id].feature = split->feature;
        tree_.nodes[id].threshold = split->threshold;

        std::vector<int> left, right;
        left.reserve(std::size_t(split->left_count));
        right.reserve(std::size_t(split->right_count));
        for (const int r : rows) {
            if (x_(r, split->feature) <= split->threshold)
                left.push_back(r);
            else
                right.push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        const int l = grow_node(std::move(left), depth + 1);
        const int r = grow_node(std::move(right), depth + 1);
        tree_.nodes[id].left = l;
        tree_.nodes[id].right = r;
        return id;
    }

    std::vector<int> sample_features() const {
        std::vector<int> pool(static_cast<std::size_t>(p_));
        std::iota(pool.begin(), pool.end(), 0);
        for (int j = 0; j < mtry_; ++j) {
            const auto i = j + int(uniform_below(rng_, std::uint64_t(p_ - j)));
            std::swap(pool[j], pool[i]);
        }
        pool.resize(std::size_t(mtry_));
        std::sort(pool.begin(), pool.end()); // ascending: ties prefer low feature index
        return pool;
    }

    const Eigen::MatrixXd& x_;
    const Eigen::VectorXd& y_;
    TreeOptions options_;
    std::mt19937_64& rng_;
    int p_;
    int mtry_;
    RegressionTree tree_;
};

} // namespace

std::size_t RegressionTree::leaf_count() const {
    std::size_t n = 0;
    for (const auto& node : nodes)
        if (node.feature < 0) ++n;
    return n;
}

std::optional<SplitDecision> best_split(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                        const std::vector<int>& candidate_features) {
    if (X.rows() != y.size()) throw DataError("best_split: X and y row counts differ");
    for (const int f : candidate_features)
        if (f < 0 || f >= X.cols())
            throw ConfigError("best_split: feature index " + std::to_string(f) + " out of range");

    std::mt19937_64 rng(0);
    TreeOptions options;
    options.features_per_split = int(X.cols());
    Grower grower(X, y, options, rng);

    std::vector<int> rows(std::size_t(X.rows()));
    std::iota(rows.begin(), rows.end(), 0);
    std::vector<int> features = candidate_features;
    std::sort(features.begin(), features.end());
    features.erase(std::unique(features.begin(), features.end()), features.end());
    return grower.search(rows, features);
}

RegressionTree fit_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const TreeOptions& options) {
    std::vector<int> rows(std::size_t(X.rows()));
    std::iota(rows.begin(), rows.end(), 0);
    std::mt19937_64 rng(options.seed);
    return fit_tree_on_rows(X, y, rows, options, rng);
}

RegressionTree fit_tree_on_rows(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                const std::vector<int>& rows, const TreeOptions& options,
                                std::mt19937_64& rng) {
    if (rows.empty() || X.rows() == 0) throw DataError("fit_tree: empty input");
    if (X.rows() != y.size()) throw DataError("fit_tree: X and y row counts differ");
    Grower grower(X, y, options, rng);
    return grower.grow(rows);
}

double predict_tree(const RegressionTree& tree, std::span<const double> x) {
    if (int(x.size()) != tree.feature_count)
        throw NumericError("predict_tree: expected " + std::to_string(tree.feature_count) +
                           " features, got " + std::to_string(x.size()));
    for (const double v : x)
        if (!std::isfinite(v)) throw NumericError("predict_tree: non-finite input");

    int id = 0;
    while (tree.nodes[std::size_t(id)].feature >= 0) {
        const auto& node = tree.nodes[std::size_t(id)];
        id = x[std::size_t(node.feature)] <= node.threshold ? node.left : node.right;
    }
    return tree.nodes[std::size_t(id)].prediction;
}

double predict_tree(const RegressionTree& tree, const Eigen::VectorXd& x) {
    return predict_tree(tree, std::span<const double>(x.data(), std::size_t(x.size())));
}

std::string tree_to_json(const RegressionTree& tree) {
    json nodes = json::array();
    for (const auto& node : tree.nodes) {
        nodes.push_back({{"feature", node.feature},
                         {"threshold", node.threshold},
                         {"prediction", node.prediction},
                         {"left", node.left},
                         {"right", node.right},
                         {"count", node.count}});
    }
    const json doc = {{"format", "epforest-tree"},
                      {"version", 1},
                      {"feature_count", tree.feature_count},
                      {"impurity_tally", tree.impurity_tally},
                      {"nodes", nodes}};
    return doc.dump();
}

RegressionTree tree_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("tree JSON parse failure: ") + e.what());
    }
    if (doc.value("format", "") != "epforest-tree" || doc.value("version", 0) != 1)
        throw DataError("not a version-1 epforest-tree document");
    RegressionTree tree;
    tree.feature_count = doc.at("feature_count").get<int>();
    tree.impurity_tally = doc.at("impurity_tally").get<std::vector<double>>();
    for (const auto& jn : doc.at("nodes")) {
        TreeNode node;
        node.feature = jn.at("feature").get<int>();
        node.threshold = jn.at("threshold").get<double>();
        node.prediction = jn.at("prediction").get<double>();
        node.left = jn.at("left").get<int>();
        node.right = jn.at("right").get<int>();
        node.count = jn.at("count").get<int>();
        tree.nodes.push_back(node);
    }
    if (tree.nodes.empty()) throw DataError("tree document has no nodes");
    return tree;
}

} // namespace epf
