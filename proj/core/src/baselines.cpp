#include "epforest/baselines.hpp"

#include "epforest/errors.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <ostream>

namespace epf {

LinearFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  std::vector<std::string> names) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();
    if (y.size() != n) throw DataError("fit_ols: X and y row counts differ");
    if (n <= k + 1)
        throw DataError("fit_ols: need more than " + std::to_string(k + 1) + " rows, got " +
                        std::to_string(n));
    if (names.empty())
        for (Eigen::Index j = 0; j < k; ++j) names.push_back("x" + std::to_string(j));
    if (Eigen::Index(names.size()) != k) throw ConfigError("fit_ols: wrong number of names");

    Eigen::MatrixXd A(n, k + 1);
    A.col(0).setOnes();
    A.rightCols(k) = X;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < k + 1) {
        // The pivot order puts dependent columns last; name them.
        const auto perm = qr.colsPermutation().indices();
        std::string collinear;
        for (Eigen::Index j = qr.rank(); j < k + 1; ++j) {
            const Eigen::Index col = perm[j];
            if (!collinear.empty()) collinear += ", ";
            collinear += col == 0 ? "intercept" : names[std::size_t(col - 1)];
        }
        throw NumericError("fit_ols: rank-deficient design, collinear columns: " + collinear);
    }

    const auto& R = qr.matrixR();
    const double r_max = std::abs(R(0, 0));
    const double r_min = std::abs(R(k, k));
    if (r_min > 0.0 && r_max / r_min > 1e8)
        std::cerr << "warning: fit_ols condition number about " << r_max / r_min << '\n';

    const Eigen::VectorXd beta = qr.solve(y);

    LinearFit fit;
    fit.intercept = beta[0];
    fit.coefficients = beta.tail(k);
    fit.residuals = y - A * beta;
    fit.rmse = std::sqrt(fit.residuals.squaredNorm() / double(n));
    fit.names = std::move(names);
    return fit;
}

LinearFit fit_ar1(const Eigen::VectorXd& y, int lag) {
    if (lag < 1) throw ConfigError("fit_ar1: lag must be positive");
    const Eigen::Index n = y.size();
    if (n < 30) throw DataError("fit_ar1: need at least 30 observations");
    if (n <= lag + 2) throw DataError("fit_ar1: series shorter than lag");

    const Eigen::Index m = n - lag;
    Eigen::MatrixXd X(m, 1);
    Eigen::VectorXd target(m);
    for (Eigen::Index t = 0; t < m; ++t) {
        X(t, 0) = y[t];
        target[t] = y[t + lag];
    }
    return fit_ols(X, target, {"lag"});
}

const ComparisonTable::Row& ComparisonTable::row(const std::string& name) const {
    for (const auto& r : rows)
        if (r.name == name) return r;
    throw ConfigError("comparison table has no row '" + name + "'");
}

ComparisonTable compare(const std::vector<std::pair<std::string, double>>& reportees,
                        const std::pair<std::string, double>& reference) {
    if (!(reference.second > 0.0))
        throw NumericError("compare: reference RMSE must be positive");
    ComparisonTable table;
    table.reference_name = reference.first;
    table.reference_value = reference.second;
    table.rows.reserve(reportees.size());
    for (const auto& [name, value] : reportees) {
        const double ratio = value / reference.second;
        table.rows.push_back({name, value, ratio, 1.0 - ratio});
    }
    return table;
}

void write_fit_csv(const LinearFit& fit, const std::string& label, std::ostream& out,
                   const std::vector<std::string>& header_lines) {
    for (const auto& h : header_lines) out << "# " << h << '\n';
    out << "model,term,value\n";
    char buf[64];
    const auto emit = [&](const std::string& term, double v) {
        std::snprintf(buf, sizeof buf, "%.10g", v);
        out << label << ',' << term << ',' << buf << '\n';
    };
    emit("intercept", fit.intercept);
    for (std::size_t j = 0; j < fit.names.size(); ++j)
        emit(fit.names[j], fit.coefficients[Eigen::Index(j)]);
    emit("rmse", fit.rmse);
}

} // namespace epf
