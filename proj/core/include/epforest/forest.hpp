#pragma once

#include "epforest/features.hpp"
#include "epforest/tree.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace epf {

enum class SamplingMode {
    Bootstrap, // n draws with replacement; ~1/3 of rows land out of bag
    Subsample, // floor(2n/3) distinct rows, no replacement
};

struct ForestOptions {
    int n_trees = 1000;
    int min_node_size = 10;
    int features_per_split = 0; // 0 -> max(1, p/3)
    int max_depth = 0;          // 0 -> unlimited
    SamplingMode sampling = SamplingMode::Bootstrap;
    std::uint64_t seed = 0;
    int n_threads = 1; // 0 -> hardware concurrency
};

/// Bagged ensemble of regression trees plus everything evaluation needs:
/// bag masks for out-of-bag scoring and training column statistics for
/// partial-effect grids.
struct ForestModel {
    std::vector<RegressionTree> trees;
    std::vector<std::vector<std::uint8_t>> bag_masks; // bag_masks[t][row] = in bag
    ForestOptions options;                            // as resolved at fit time
    std::vector<std::string> column_names;
    Eigen::VectorXd column_means;
    Eigen::VectorXd column_min;
    Eigen::VectorXd column_max;
    std::vector<Date> training_dates;
    std::string target;

    int feature_count() const { return int(column_names.size()); }
};

/// Grows options.n_trees trees, each on its own resample with a seed derived
/// from the master seed and the tree index. Results are identical for any
/// n_threads. A constant target is tolerated with a warning; the forest
/// degenerates to single-leaf trees.
ForestModel fit_forest(const DesignMatrix& design, const ForestOptions& options);

/// Arithmetic mean of all tree predictions.
double predict_forest(const ForestModel& model, const Eigen::VectorXd& x);

/// Per-row out-of-bag predictions. Rows that landed in every bag carry no
/// prediction and are flagged unavailable.
struct OobPrediction {
    Eigen::VectorXd values; // NaN where unavailable
    std::vector<std::uint8_t> available;

    std::size_t available_count() const;
};

/// Averages, for each row, only the trees whose bag excludes it. The design
/// must be the one the model was fitted on (dates are checked).
OobPrediction oob_predict(const ForestModel& model, const DesignMatrix& design);

/// Root mean squared error over all pairs.
double rmse(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual);

/// RMSE over the available pairs only; no available pair is an error.
double rmse(const OobPrediction& predicted, const Eigen::VectorXd& actual);

/// In-sample predictions for every design row.
Eigen::VectorXd predict_rows(const ForestModel& model, const DesignMatrix& design);

/// Normalized impurity importances: per-feature SSE-reduction tallies summed
/// across trees and divided by the grand total. Entries are nonnegative and
/// sum to one. A forest with no splits at all raises NumericError.
struct ImportanceTable {
    std::vector<std::string> names;
    Eigen::VectorXd values;
};

ImportanceTable importance(const ForestModel& model);

/// Out-of-bag MSE using only the first k trees, for each checkpoint k.
/// Checkpoints must lie in [1, n_trees]; results come back in ascending
/// checkpoint order.
std::vector<std::pair<int, double>> error_curve(const ForestModel& model,
                                                const DesignMatrix& design,
                                                std::vector<int> checkpoints);

/// Two-feature prediction surface with every other feature pinned at its
/// training-sample mean.
struct PartialGrid {
    int feature_a = -1;
    int feature_b = -1;
    std::vector<double> a_values;
    std::vector<double> b_values;
    Eigen::MatrixXd values; // a_values.size() x b_values.size()
};

struct GridSpec {
    int a_points = 25;
    int b_points = 25;
    // Optional explicit ranges, clamped to the observed feature ranges.
    std::optional<std::pair<double, double>> a_range;
    std::optional<std::pair<double, double>> b_range;
};

/// Evaluates the forest over an equally spaced grid spanning the observed
/// range of the two features. A single-point axis sits at the column mean.
PartialGrid partial_grid(const ForestModel& model, int feature_a, int feature_b,
                         const GridSpec& grid = {});

/// Versioned JSON bundle: hyperparameters, column statistics, tree list,
/// optionally the bag masks.
std::string forest_to_json(const ForestModel& model, bool include_bag_masks = true);
ForestModel forest_from_json(const std::string& text);

/// Table-2-style CSV: one labelled row of 12 normalized importances each.
void write_importance_csv(const std::vector<std::pair<std::string, ImportanceTable>>& rows,
                          std::ostream& out, const std::vector<std::string>& header_lines = {});

/// Long-format CSV (a-value, b-value, prediction).
void write_partial_grid_csv(const PartialGrid& grid, const std::string& a_name,
                            const std::string& b_name, std::ostream& out,
                            const std::vector<std::string>& header_lines = {});

} // namespace epf
