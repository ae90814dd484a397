#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace epf {

/// Least-squares fit with intercept.
struct LinearFit {
    Eigen::VectorXd coefficients; // per regressor, intercept excluded
    double intercept = 0.0;
    Eigen::VectorXd residuals;
    double rmse = 0.0; // sqrt(mean of squared residuals)
    std::vector<std::string> names;

    double predict(const Eigen::VectorXd& x) const {
        return intercept + coefficients.dot(x);
    }
};

/// OLS with intercept via Householder QR with column pivoting. Rank
/// deficiency raises NumericError naming the collinear columns; a condition
/// number above 1e8 prints a warning.
LinearFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  std::vector<std::string> names = {});

/// Regresses y[t] on a constant and y[t-lag]. The default lag of one step
/// is the classic AR(1); the price pipeline passes lag = 22 so that one
/// step means one 22-working-day "month" of the target-change series.
LinearFit fit_ar1(const Eigen::VectorXd& y, int lag = 1);

/// Ratio table against a reference RMSE: ratio = value / reference and
/// percentage-below = 1 - ratio.
struct ComparisonTable {
    struct Row {
        std::string name;
        double value = 0.0;
        double ratio = 0.0;
        double pct_below = 0.0; // fraction, 0.228 = 22.8%
    };
    std::string reference_name;
    double reference_value = 0.0;
    std::vector<Row> rows;

    const Row& row(const std::string& name) const;
};

ComparisonTable compare(const std::vector<std::pair<std::string, double>>& reportees,
                        const std::pair<std::string, double>& reference);

/// Coefficient block plus RMSE line, mirroring the econometrics columns of
/// the RMSE-grid report.
void write_fit_csv(const LinearFit& fit, const std::string& label, std::ostream& out,
                   const std::vector<std::string>& header_lines = {});

} // namespace epf
