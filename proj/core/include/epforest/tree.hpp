#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace epf {

/// The winning (feature, threshold) pair of one exhaustive split search.
struct SplitDecision {
    int feature = -1;
    double threshold = 0.0;
    double sse_reduction = 0.0; // SSE(parent) - SSE(left) - SSE(right)
    int left_count = 0;
    int right_count = 0;
};

/// Flat node: internal iff feature >= 0. Rows with x[feature] <= threshold
/// go left.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    double prediction = 0.0; // leaf: mean of its training targets
    int left = -1;
    int right = -1;
    int count = 0;
};

/// Least-squares CART tree. nodes[0] is the root.
struct RegressionTree {
    std::vector<TreeNode> nodes;
    int feature_count = 0;
    std::vector<double> impurity_tally; // per-feature summed SSE reduction

    std::size_t leaf_count() const;
};

struct TreeOptions {
    int min_node_size = 10;     // a node must hold at least this many rows to be split
    int features_per_split = 0; // 0 -> max(1, p/3)
    int max_depth = 0;          // 0 -> unlimited
    std::uint64_t seed = 0;
};

/// Exhaustive least-squares split search over the candidate features and all
/// midpoints between consecutive distinct sorted values. Returns nullopt if
/// no split strictly reduces SSE. Ties (within 1e-12 relative, which covers
/// identical partitions reachable through different features) break to the
/// lowest feature index, then the lowest threshold.
std::optional<SplitDecision> best_split(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                        const std::vector<int>& candidate_features);

/// Grows a tree by recursive splitting. A node is split only while its size
/// is at least min_node_size and a fresh uniform random subset of
/// features_per_split features yields an SSE-reducing split.
RegressionTree fit_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const TreeOptions& options);

/// As fit_tree, but trained on the given rows (duplicates allowed; this is
/// what bagging feeds in). `rng` supplies the feature subsets.
RegressionTree fit_tree_on_rows(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                const std::vector<int>& rows, const TreeOptions& options,
                                std::mt19937_64& rng);

/// Routes x down the tree; values equal to a threshold go left.
/// Non-finite input raises NumericError.
double predict_tree(const RegressionTree& tree, std::span<const double> x);
double predict_tree(const RegressionTree& tree, const Eigen::VectorXd& x);

/// Versioned JSON document (node list with feature/threshold/prediction).
std::string tree_to_json(const RegressionTree& tree);
RegressionTree tree_from_json(const std::string& text);

} // namespace epf
