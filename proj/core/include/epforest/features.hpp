#pragma once

#include "epforest/panel.hpp"

#include <Eigen/Dense>

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace epf {

/// Per-variable transform producing one predictor column. All horizons are
/// 22 working days, the toolkit's "monthly" convention.
enum class Transform {
    Level,          // value as-is
    Diff22,         // s[t] - s[t-22]
    LogDiff22,      // ln s[t] - ln s[t-22]
    RollingMean22,  // trailing 22-day average, as a level
    MeanDiff22,     // Diff22 of the 22-day rolling mean
    MeanLogDiff22,  // LogDiff22 of the 22-day rolling mean
    DayOfWeek,      // 1 = Monday .. 5 = Friday
    Reversal,       // the target's 22-day change, lagged 22 working days
};

Transform parse_transform(const std::string& token);
std::string transform_name(Transform t);

enum class ChangeKind { LogDiff, Diff };

/// Trailing mean over `window` observations; the first window-1 entries are
/// NaN (unavailable). window > length raises DataError.
std::vector<double> rolling_mean(const std::vector<double>& series, int window = 22);

/// 22-day change. LogDiff requires strictly positive values and raises
/// NumericError naming the offending index otherwise. The first `horizon`
/// entries are NaN.
std::vector<double> change_22(const std::vector<double>& series, ChangeKind kind,
                              int horizon = 22);

/// The 12 predictor columns in canonical (output) order.
const std::array<std::string, 12>& predictor_names();

/// Recipe per predictor column: which panel variable feeds it and how it is
/// transformed. Loaded from a plain-text config with one
/// `variable = transform` line per variable; a `target = ...` line selects
/// the target transform.
struct FeatureSpec {
    struct Recipe {
        std::string source; // panel variable ("" for calendar/target-derived)
        Transform transform;
    };

    std::vector<std::pair<std::string, Recipe>> features; // canonical order
    Transform target_transform = Transform::LogDiff22;

    const Recipe& recipe(const std::string& feature) const;
    Recipe& recipe(const std::string& feature);

    /// The defaults: log changes for price levels (permit, oil, coal,
    /// natgas, cpi), simple changes for temp/i/vix, changes of 22-day
    /// averages for qwind/suntime, day-of-week and reversal for the rest.
    static FeatureSpec defaults();

    static FeatureSpec load(const std::filesystem::path& path);
    void save(std::ostream& out) const;
};

/// Features plus target for one price series, warm-up rows dropped.
struct DesignMatrix {
    std::vector<Date> dates;
    Eigen::MatrixXd X; // n x 12
    Eigen::VectorXd y; // 22-day change of the target price
    std::vector<std::string> column_names;
    std::string target; // "base" | "peak"

    Eigen::Index rows() const { return X.rows(); }
    Eigen::Index cols() const { return X.cols(); }
    int column_index(const std::string& name) const;
};

/// Builds the design matrix from a gap-free, currency-converted panel.
/// Fewer than `min_rows` surviving rows raises DataError.
DesignMatrix build_design(const DailyPanel& panel, const FeatureSpec& spec,
                          const std::string& target, int min_rows = 100);

/// CSV dump: `date,y,<12 predictor columns>` in canonical column order.
void write_design_csv(const DesignMatrix& design, std::ostream& out,
                      const std::vector<std::string>& header_lines = {});

} // namespace epf
