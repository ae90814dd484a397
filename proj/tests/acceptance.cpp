// Acceptance suite: runs every primary criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit code 0 only if all pass.

#include "commands.hpp"
#include "run_config.hpp"

#include "epforest/baselines.hpp"
#include "epforest/errors.hpp"
#include "epforest/features.hpp"
#include "epforest/forest.hpp"
#include "epforest/panel.hpp"
#include "epforest/synth.hpp"
#include "epforest/tree.hpp"

#include "oracles.hpp"
#include "test_helpers.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace epf;

namespace {

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s: %s (%s)\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

DesignMatrix scenario_design(const ScenarioSpec& spec, const std::string& target = "base") {
    auto panel = convert_to_eur(fill_gaps(generate(spec), FillPolicy::ForwardFill));
    return build_design(panel, FeatureSpec::defaults(), target);
}

double column_sd(const DesignMatrix& design, int column) {
    const double mean = design.X.col(column).mean();
    return std::sqrt((design.X.col(column).array() - mean).square().sum() /
                     double(design.rows()));
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= double(a.size());
    mb /= double(b.size());
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    return cov / std::sqrt(va * vb);
}

// --- Criterion 1: published ratio arithmetic ------------------------------

void table1_arithmetic() {
    const auto r1 = compare({{"rf", 0.168}}, {"ols", 0.339}).rows.front().ratio;
    const auto r2 = compare({{"rf", 0.144}}, {"ols", 0.339}).rows.front().ratio;
    const auto below_ar1 = compare({{"oob", 0.312}}, {"ar1", 0.404}).rows.front().pct_below;
    const auto below_ols = compare({{"oob", 0.312}}, {"ols", 0.339}).rows.front().pct_below;
    const bool pass = std::abs(r1 - 0.495) <= 0.001 && std::abs(r2 - 0.425) <= 0.001 &&
                      std::abs(below_ar1 - 0.228) <= 0.001 && std::abs(below_ols - 0.08) <= 0.005;
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "0.168/0.339=%.4f, 0.144/0.339=%.4f, below ar1=%.1f%%, below ols=%.1f%%", r1,
                  r2, 100.0 * below_ar1, 100.0 * below_ols);
    report("table1-arithmetic", pass, detail);
}

// --- Criterion 2: split search equals the exhaustive oracle ---------------

void cart_oracle() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<int> n_dist(5, 200);
    std::uniform_int_distribution<int> p_dist(1, 5);
    std::uniform_int_distribution<int> levels(2, 8);

    int mismatches = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = n_dist(rng);
        const int p = p_dist(rng);
        Eigen::MatrixXd X(n, p);
        Eigen::VectorXd y(n);
        const bool discretize = trial % 4 == 0;
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < p; ++c) {
                const double v = gauss(rng);
                X(r, c) = discretize ? std::round(v * levels(rng)) / 2.0 : v;
            }
            y[r] = gauss(rng);
        }
        std::vector<int> features(static_cast<std::size_t>(p));
        std::iota(features.begin(), features.end(), 0);
        const auto got = best_split(X, y, features);
        const auto want = oracle::best_split(X, y, features);
        const bool same =
            got.has_value() == want.has_value() &&
            (!want || (got->feature == want->feature && got->threshold == want->threshold &&
                       std::abs(got->sse_reduction - want->reduction) <=
                           1e-9 * std::max(1.0, want->reduction)));
        if (!same) ++mismatches;
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "%d/200 instances matched, %.1f s", 200 - mismatches,
                  seconds_since(start));
    report("cart-oracle-equivalence", mismatches == 0 && seconds_since(start) < 10.0, detail);
}

// --- Criterion 3: perfect fit at full depth -------------------------------

void perfect_fit() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(7);
    int bad = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto design = helpers::random_design(
            60, 4, rng(), [](const Eigen::VectorXd& x) { return x[0] - x[1] * x[2]; }, 1.0);
        TreeOptions options;
        options.min_node_size = 2;
        options.features_per_split = 4;
        const auto tree = fit_tree(design.X, design.y, options);
        double sse = 0.0;
        for (Eigen::Index r = 0; r < design.rows(); ++r) {
            Eigen::VectorXd x = design.X.row(r);
            const double d = predict_tree(tree, x) - design.y[r];
            sse += d * d;
        }
        if (std::sqrt(sse / double(design.rows())) > 1e-12) ++bad;
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "%d/50 instances at zero rmse, %.1f s", 50 - bad,
                  seconds_since(start));
    report("perfect-fit", bad == 0 && seconds_since(start) < 5.0, detail);
}

// --- Criterion 4: OLS vs normal-equations oracle --------------------------

void ols_oracle() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(12);
    std::normal_distribution<double> gauss(0.0, 1.0);
    int bad = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 150 + int(rng() % 100);
        const int k = 2 + int(rng() % 4);
        Eigen::MatrixXd X(n, k);
        Eigen::VectorXd y(n);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < k; ++c) X(r, c) = gauss(rng);
            y[r] = X(r, 0) - 0.5 * X(r, k - 1) + 0.7 * gauss(rng);
        }
        const auto fit = fit_ols(X, y);
        const auto beta = oracle::normal_equations_ols(X, y);
        bool ok = std::abs(fit.intercept - beta[0]) <= 1e-8 * std::max(1.0, std::abs(beta[0]));
        for (int c = 0; c < k && ok; ++c)
            ok = std::abs(fit.coefficients[c] - beta[c + 1]) <=
                 1e-8 * std::max(1.0, std::abs(beta[c + 1]));
        const double scale = std::max(1.0, y.norm());
        if (std::abs(fit.residuals.sum()) > 1e-8 * double(n) * scale) ok = false;
        for (int c = 0; c < k && ok; ++c)
            ok = std::abs(fit.residuals.dot(X.col(c))) <= 1e-8 * double(n) * scale;
        if (!ok) ++bad;
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "%d/100 instances matched to 1e-8, %.1f s", 100 - bad,
                  seconds_since(start));
    report("ols-oracle", bad == 0 && seconds_since(start) < 5.0, detail);
}

// --- Criterion 5: out-of-bag protocol audit -------------------------------

void oob_audit() {
    const auto start = std::chrono::steady_clock::now();
    const auto design = helpers::random_design(
        500, 12, 99, [](const Eigen::VectorXd& x) { return x[0] + x[1] * x[2]; }, 0.4);
    ForestOptions options;
    options.n_trees = 1000;
    options.min_node_size = 10;
    options.seed = 17;
    options.n_threads = 0;
    const auto model = fit_forest(design, options);

    bool fractions_ok = true;
    for (const auto& mask : model.bag_masks) {
        const double unique =
            double(std::count(mask.begin(), mask.end(), std::uint8_t(1))) / double(mask.size());
        if (unique < 0.55 || unique > 0.72) fractions_ok = false;
    }

    // Recompute every OOB average from the masks; any in-bag contribution
    // would break the equality.
    const auto oob = oob_predict(model, design);
    bool audit_ok = true;
    for (Eigen::Index r = 0; r < design.rows() && audit_ok; ++r) {
        Eigen::VectorXd x = design.X.row(r);
        double sum = 0.0;
        int used = 0;
        for (std::size_t t = 0; t < model.trees.size(); ++t) {
            if (model.bag_masks[t][std::size_t(r)]) continue;
            sum += predict_tree(model.trees[t], x);
            ++used;
        }
        if (used == 0)
            audit_ok = !oob.available[std::size_t(r)];
        else
            audit_ok = oob.available[std::size_t(r)] &&
                       std::abs(oob.values[r] - sum / used) <= 1e-12 * std::max(1.0, std::abs(sum));
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "mask audit %s, bag fractions %s, %.1f s",
                  audit_ok ? "exact" : "violated", fractions_ok ? "in [0.55,0.72]" : "out of band",
                  seconds_since(start));
    report("oob-protocol-audit", audit_ok && fractions_ok && seconds_since(start) < 60.0, detail);
}

// --- Criterion 6: synthetic recovery of the headline findings -------------

void synthetic_recovery() {
    const auto start = std::chrono::steady_clock::now();
    ScenarioSpec spec = ScenarioSpec::defaults();
    spec.horizon = 2600;
    spec.seed = 2;
    const auto design = scenario_design(spec);

    const auto ols = fit_ols(design.X, design.y, design.column_names);
    ForestOptions options;
    options.n_trees = 500;
    options.min_node_size = 10;
    options.seed = 7;
    options.n_threads = 0;
    const auto model = fit_forest(design, options);

    const double in_sample = rmse(predict_rows(model, design), design.y);
    const double oob = rmse(oob_predict(model, design), design.y);
    const bool oob_beats_ols = oob < ols.rmse;
    const bool half_ols = in_sample <= 0.6 * ols.rmse;

    const auto table = importance(model);
    const int reversal = design.column_index("reversal");
    bool reversal_first = true;
    for (Eigen::Index f = 0; f < table.values.size(); ++f)
        if (int(f) != reversal && table.values[f] >= table.values[reversal])
            reversal_first = false;
    const double natgas = table.values[design.column_index("natgas")];
    const bool natgas_first = natgas > table.values[design.column_index("oil")] &&
                              natgas > table.values[design.column_index("coal")];

    // Surface recovery over the central +/-2 sd of each driver, where the
    // training sample actually lives.
    const int pm = design.column_index("permit");
    const int ng = design.column_index("natgas");
    GridSpec grid;
    const double pm_mean = design.X.col(pm).mean();
    const double ng_mean = design.X.col(ng).mean();
    grid.a_range = {{pm_mean - 2.0 * column_sd(design, pm), pm_mean + 2.0 * column_sd(design, pm)}};
    grid.b_range = {{ng_mean - 2.0 * column_sd(design, ng), ng_mean + 2.0 * column_sd(design, ng)}};
    const auto surface = partial_grid(model, pm, ng, grid);
    std::vector<double> predicted, planted;
    Eigen::VectorXd point = model.column_means;
    for (std::size_t i = 0; i < surface.a_values.size(); ++i) {
        for (std::size_t j = 0; j < surface.b_values.size(); ++j) {
            predicted.push_back(surface.values(Eigen::Index(i), Eigen::Index(j)));
            point[pm] = surface.a_values[i];
            point[ng] = surface.b_values[j];
            planted.push_back(ground_truth(spec, point));
        }
    }
    const double r = pearson(predicted, planted);

    char detail[200];
    std::snprintf(detail, sizeof detail,
                  "oob=%.3f vs ols=%.3f, in/ols=%.2f, reversal first=%d, natgas first=%d, "
                  "surface r=%.3f, %.0f s",
                  oob, ols.rmse, in_sample / ols.rmse, reversal_first, natgas_first, r,
                  seconds_since(start));
    report("synthetic-recovery",
           oob_beats_ols && half_ols && reversal_first && natgas_first && r >= 0.9 &&
               seconds_since(start) < 300.0,
           detail);
}

// --- Criterion 7: Table-1 shape on synthetic data -------------------------

void table1_shape() {
    const auto start = std::chrono::steady_clock::now();
    ScenarioSpec spec = ScenarioSpec::defaults();
    spec.horizon = 2600;
    spec.seed = 1;
    spec.level_noise = 0.18; // noise-dominated, like the published data
    const auto design = scenario_design(spec);

    ForestOptions options;
    options.n_trees = 200;
    options.features_per_split = 12; // deterministic splits: depth is the only knob
    options.seed = 11;
    options.n_threads = 0;

    bool strictly_decreasing = true;
    double previous = -1.0;
    double oob_lo = 1e300, oob_hi = 0.0;
    for (const int min_node : {40, 30, 20, 10, 5}) {
        options.min_node_size = min_node;
        const auto model = fit_forest(design, options);
        const double in_sample = rmse(predict_rows(model, design), design.y);
        const double oob = rmse(oob_predict(model, design), design.y);
        if (previous >= 0.0 && in_sample >= previous) strictly_decreasing = false;
        previous = in_sample;
        oob_lo = std::min(oob_lo, oob);
        oob_hi = std::max(oob_hi, oob);
    }
    const double variation = (oob_hi - oob_lo) / oob_lo;
    char detail[128];
    std::snprintf(detail, sizeof detail,
                  "in-sample strictly decreasing=%d, oob variation=%.1f%%, %.0f s",
                  strictly_decreasing, 100.0 * variation, seconds_since(start));
    report("table1-shape", strictly_decreasing && variation < 0.10 && seconds_since(start) < 300.0,
           detail);
}

// --- Criterion 8: importance normalization --------------------------------

void importance_normalization() {
    const auto dir = helpers::temp_dir("acceptance_importance");
    ScenarioSpec spec = ScenarioSpec::defaults();
    spec.horizon = 900;
    spec.seed = 5;
    std::ostringstream buffer;
    spec.save(buffer);
    const auto scenario = helpers::write_file(dir / "scenario.conf", buffer.str());

    epf::cli::RunConfig config;
    config.scenario = scenario;
    config.out_dir = dir;
    config.min_node_sizes = {10};
    config.tree_counts = {100};
    config.min_rows = 50;
    config.ranges = {{parse_date("2012-01-02"), parse_date("2015-06-01")},
                     {parse_date("2013-06-01"), parse_date("2015-06-01")},
                     {parse_date("2014-01-01"), parse_date("2015-06-01")}};
    const auto files = epf::cli::run_importance(config);

    // The emitted rows are rounded to 6 digits; re-derive the exact vectors
    // for the 1e-12 check and use the file for structure.
    std::ifstream in(files.front());
    std::string line;
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#' && line.rfind("label", 0) != 0) ++rows;

    bool exact_ok = true;
    const auto panel = epf::cli::load_panel(config);
    for (const auto& [lo, hi] : config.ranges) {
        const auto slice = filter_dates(panel, lo, hi);
        auto slice_config = config;
        const auto design = epf::cli::load_design(slice_config, slice);
        ForestOptions options;
        options.n_trees = 100;
        options.min_node_size = 10;
        options.seed = config.seed;
        const auto model = fit_forest(design, options);
        const auto table = importance(model);
        if (std::abs(table.values.sum() - 1.0) > 1e-12) exact_ok = false;
        if (table.values.minCoeff() < 0.0) exact_ok = false;
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "%d emitted rows, exact sums within 1e-12: %d", rows,
                  exact_ok);
    report("importance-normalization", rows == 3 && exact_ok, detail);
}

// --- Criterion 9: byte-identical outputs across worker counts -------------

void determinism() {
    const auto start = std::chrono::steady_clock::now();
    const auto dir_a = helpers::temp_dir("acceptance_det_a");
    const auto dir_b = helpers::temp_dir("acceptance_det_b");
    ScenarioSpec spec = ScenarioSpec::defaults();
    spec.horizon = 1200;
    spec.seed = 3;
    std::ostringstream buffer;
    spec.save(buffer);
    const auto scenario = helpers::write_file(dir_a / "scenario.conf", buffer.str());

    epf::cli::RunConfig config;
    config.scenario = scenario;
    config.min_node_sizes = {10, 20};
    config.tree_counts = {100};
    config.seed = 21;
    config.out_dir = dir_a;
    config.threads = 1;
    epf::cli::run_table1(config);
    config.out_dir = dir_b;
    config.threads = 4;
    epf::cli::run_table1(config);

    const auto bytes_a = helpers::read_file(dir_a / "table1_base.csv");
    const auto bytes_b = helpers::read_file(dir_b / "table1_base.csv");
    char detail[96];
    std::snprintf(detail, sizeof detail, "%zu bytes, identical=%d, %.0f s", bytes_a.size(),
                  bytes_a == bytes_b, seconds_since(start));
    report("determinism-across-workers",
           !bytes_a.empty() && bytes_a == bytes_b && seconds_since(start) < 300.0, detail);
}

// --- Criterion 10: benchmark-scale fit under 60 s -------------------------

void benchmark_performance() {
    ScenarioSpec spec = ScenarioSpec::defaults();
    spec.horizon = 2668; // 2,624 design rows after the 44-row warm-up
    spec.seed = 4;
    const auto design = scenario_design(spec);

    ForestOptions options;
    options.n_trees = 1000;
    options.min_node_size = 10;
    options.seed = 1;
    options.n_threads = 0;

    const auto start = std::chrono::steady_clock::now();
    const auto model = fit_forest(design, options);
    const double elapsed = seconds_since(start);
    char detail[96];
    std::snprintf(detail, sizeof detail, "%d trees on %ldx%ld design in %.1f s",
                  int(model.trees.size()), long(design.rows()), long(design.cols()), elapsed);
    report("benchmark-performance", design.rows() == 2624 && elapsed < 60.0, detail);
}

} // namespace

int main() {
    std::printf("epforest acceptance suite\n");
    table1_arithmetic();
    cart_oracle();
    perfect_fit();
    ols_oracle();
    oob_audit();
    synthetic_recovery();
    table1_shape();
    importance_normalization();
    determinism();
    benchmark_performance();
    std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "OK" : "FAILURE", failures);
    return failures == 0 ? 0 : 1;
}
