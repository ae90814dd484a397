#include "epforest/forest.hpp"

#include "epforest/errors.hpp"
#include "epforest/random.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

namespace epf {

namespace {

using json = nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? int(hw) : 1;
}

// Draws the bag for one tree and grows it. All randomness comes from the
// per-tree engine, so tree t is the same object no matter which worker runs it.
void fit_one_tree(const DesignMatrix& design, const ForestOptions& options, std::uint64_t tree_seed,
                  RegressionTree& tree, std::vector<std::uint8_t>& in_bag) {
    const int n = int(design.rows());
    std::mt19937_64 rng(tree_seed);

    std::vector<int> rows;
    in_bag.assign(std::size_t(n), 0);
    if (options.sampling == SamplingMode::Bootstrap) {
        rows.resize(std::size_t(n));
        for (int i = 0; i < n; ++i) {
            const int r = int(uniform_below(rng, std::uint64_t(n)));
            rows[std::size_t(i)] = r;
            in_bag[std::size_t(r)] = 1;
        }
    } else {
        const int m = (2 * n) / 3;
        std::vector<int> pool(static_cast<std::size_t>(n));
        std::iota(pool.begin(), pool.end(), 0);
        for (int j = 0; j < m; ++j) {
            const auto i = j + int(uniform_below(rng, std::uint64_t(n - j)));
            std::swap(pool[std::size_t(j)], pool[std::size_t(i)]);
        }
        pool.resize(std::size_t(m));
        rows = std::move(pool);
        for (const int r : rows) in_bag[std::size_t(r)] = 1;
    }
    std::sort(rows.begin(), rows.end());

    TreeOptions tree_options;
    tree_options.min_node_size = options.min_node_size;
    tree_options.features_per_split = options.features_per_split;
    tree_options.max_depth = options.max_depth;
    tree = fit_tree_on_rows(design.X, design.y, rows, tree_options, rng);
}

} // namespace

ForestModel fit_forest(const DesignMatrix& design, const ForestOptions& options) {
    const int n = int(design.rows());
    const int p = int(design.cols());
    if (n < 2) throw DataError("fit_forest: need at least 2 rows");
    if (options.n_trees < 1) throw ConfigError("fit_forest: n_trees must be at least 1");

    if (design.y.maxCoeff() == design.y.minCoeff())
        std::cerr << "warning: constant target, forest degenerates to single-leaf trees\n";

    ForestModel model;
    model.options = options;
    model.options.features_per_split =
        options.features_per_split > 0 ? options.features_per_split : std::max(1, p / 3);
    model.options.n_threads = resolve_threads(options.n_threads);
    model.column_names = design.column_names;
    model.column_means = design.X.colwise().mean();
    model.column_min = design.X.colwise().minCoeff();
    model.column_max = design.X.colwise().maxCoeff();
    model.training_dates = design.dates;
    model.target = design.target;
    model.trees.resize(std::size_t(options.n_trees));
    model.bag_masks.resize(std::size_t(options.n_trees));

    const int workers = std::min(model.options.n_threads, options.n_trees);
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    const auto run = [&] {
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= options.n_trees) return;
            try {
                fit_one_tree(design, model.options, derive_seed(options.seed, std::uint64_t(t)),
                             model.trees[std::size_t(t)], model.bag_masks[std::size_t(t)]);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    if (workers <= 1) {
        run();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(std::size_t(workers));
        for (int w = 0; w < workers; ++w) threads.emplace_back(run);
        for (auto& th : threads) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return model;
}

double predict_forest(const ForestModel& model, const Eigen::VectorXd& x) {
    if (model.trees.empty()) throw DataError("predict_forest: empty model");
    double sum = 0.0;
    for (const auto& tree : model.trees) sum += predict_tree(tree, x);
    return sum / double(model.trees.size());
}

std::size_t OobPrediction::available_count() const {
    std::size_t n = 0;
    for (const auto a : available)
        if (a) ++n;
    return n;
}

OobPrediction oob_predict(const ForestModel& model, const DesignMatrix& design) {
    if (model.training_dates != design.dates)
        throw DataError("oob_predict: design dates do not match the training design");
    if (model.bag_masks.size() != model.trees.size())
        throw DataError("oob_predict: model carries no bag masks");
    const std::size_t n = std::size_t(design.rows());

    std::vector<double> sums(n, 0.0);
    std::vector<int> counts(n, 0);
    std::vector<double> row(std::size_t(design.cols()));
    for (std::size_t t = 0; t < model.trees.size(); ++t) {
        const auto& mask = model.bag_masks[t];
        for (std::size_t r = 0; r < n; ++r) {
            if (mask[r]) continue;
            for (Eigen::Index c = 0; c < design.cols(); ++c)
                row[std::size_t(c)] = design.X(Eigen::Index(r), c);
            sums[r] += predict_tree(model.trees[t], row);
            ++counts[r];
        }
    }

    OobPrediction out;
    out.values.resize(Eigen::Index(n));
    out.available.assign(n, 0);
    for (std::size_t r = 0; r < n; ++r) {
        if (counts[r] > 0) {
            out.values[Eigen::Index(r)] = sums[r] / counts[r];
            out.available[r] = 1;
        } else {
            out.values[Eigen::Index(r)] = kNaN;
        }
    }
    return out;
}

double rmse(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual) {
    if (predicted.size() != actual.size()) throw DataError("rmse: length mismatch");
    if (predicted.size() == 0) throw NumericError("rmse: no pairs");
    return std::sqrt((predicted - actual).squaredNorm() / double(predicted.size()));
}

double rmse(const OobPrediction& predicted, const Eigen::VectorXd& actual) {
    if (predicted.values.size() != actual.size()) throw DataError("rmse: length mismatch");
    double sum = 0.0;
    std::size_t n = 0;
    for (Eigen::Index r = 0; r < actual.size(); ++r) {
        if (!predicted.available[std::size_t(r)]) continue;
        const double d = predicted.values[r] - actual[r];
        sum += d * d;
        ++n;
    }
    if (n == 0) throw NumericError("rmse: no available pairs");
    return std::sqrt(sum / double(n));
}

Eigen::VectorXd predict_rows(const ForestModel& model, const DesignMatrix& design) {
    Eigen::VectorXd out(design.rows());
    std::vector<double> row(std::size_t(design.cols()));
    for (Eigen::Index r = 0; r < design.rows(); ++r) {
        for (Eigen::Index c = 0; c < design.cols(); ++c) row[std::size_t(c)] = design.X(r, c);
        double sum = 0.0;
        for (const auto& tree : model.trees) sum += predict_tree(tree, row);
        out[r] = sum / double(model.trees.size());
    }
    return out;
}

ImportanceTable importance(const ForestModel& model) {
    const std::size_t p = std::size_t(model.feature_count());
    Eigen::VectorXd tally = Eigen::VectorXd::Zero(Eigen::Index(p));
    for (const auto& tree : model.trees)
        for (std::size_t f = 0; f < p; ++f) tally[Eigen::Index(f)] += tree.impurity_tally[f];
    const double total = tally.sum();
    if (!(total > 0.0))
        throw NumericError("importance: forest has no splits to attribute");
    ImportanceTable table;
    table.names = model.column_names;
    table.values = tally / total;
    return table;
}

std::vector<std::pair<int, double>> error_curve(const ForestModel& model,
                                                const DesignMatrix& design,
                                                std::vector<int> checkpoints) {
    if (model.training_dates != design.dates)
        throw DataError("error_curve: design dates do not match the training design");
    if (model.bag_masks.size() != model.trees.size())
        throw DataError("error_curve: model carries no bag masks");
    for (const int k : checkpoints) {
        if (k < 1) throw ConfigError("error_curve: checkpoints must be at least 1");
        if (k > int(model.trees.size()))
            throw ConfigError("error_curve: checkpoint " + std::to_string(k) + " exceeds " +
                              std::to_string(model.trees.size()) + " trees");
    }
    std::sort(checkpoints.begin(), checkpoints.end());
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());

    const std::size_t n = std::size_t(design.rows());
    std::vector<double> sums(n, 0.0);
    std::vector<int> counts(n, 0);
    std::vector<double> row(std::size_t(design.cols()));

    std::vector<std::pair<int, double>> curve;
    std::size_t next_checkpoint = 0;
    for (std::size_t t = 0; t < model.trees.size() && next_checkpoint < checkpoints.size(); ++t) {
        const auto& mask = model.bag_masks[t];
        for (std::size_t r = 0; r < n; ++r) {
            if (mask[r]) continue;
            for (Eigen::Index c = 0; c < design.cols(); ++c)
                row[std::size_t(c)] = design.X(Eigen::Index(r), c);
            sums[r] += predict_tree(model.trees[t], row);
            ++counts[r];
        }
        if (int(t) + 1 == checkpoints[next_checkpoint]) {
            double sq = 0.0;
            std::size_t avail = 0;
            for (std::size_t r = 0; r < n; ++r) {
                if (counts[r] == 0) continue;
                const double d = sums[r] / counts[r] - design.y[Eigen::Index(r)];
                sq += d * d;
                ++avail;
            }
            if (avail == 0)
                throw NumericError("error_curve: no out-of-bag rows at checkpoint " +
                                   std::to_string(t + 1));
            curve.emplace_back(int(t) + 1, sq / double(avail));
            ++next_checkpoint;
        }
    }
    return curve;
}

PartialGrid partial_grid(const ForestModel& model, int feature_a, int feature_b,
                         const GridSpec& grid) {
    const int p = model.feature_count();
    if (feature_a < 0 || feature_a >= p || feature_b < 0 || feature_b >= p)
        throw ConfigError("partial_grid: feature index out of range");
    if (feature_a == feature_b) throw ConfigError("partial_grid: features must be distinct");
    if (grid.a_points < 1 || grid.b_points < 1)
        throw ConfigError("partial_grid: grid must have at least 1 point per axis");

    const auto axis = [&](int feature, int points,
                          const std::optional<std::pair<double, double>>& range) {
        std::vector<double> values;
        if (points == 1) {
            values.push_back(model.column_means[feature]);
            return values;
        }
        double lo = model.column_min[feature];
        double hi = model.column_max[feature];
        if (range) {
            lo = std::max(lo, range->first);
            hi = std::min(hi, range->second);
            if (!(lo <= hi)) throw ConfigError("partial_grid: empty axis range after clamping");
        }
        values.reserve(std::size_t(points));
        for (int i = 0; i < points; ++i)
            values.push_back(lo + (hi - lo) * double(i) / double(points - 1));
        return values;
    };

    PartialGrid out;
    out.feature_a = feature_a;
    out.feature_b = feature_b;
    out.a_values = axis(feature_a, grid.a_points, grid.a_range);
    out.b_values = axis(feature_b, grid.b_points, grid.b_range);
    out.values.resize(Eigen::Index(out.a_values.size()), Eigen::Index(out.b_values.size()));

    Eigen::VectorXd x = model.column_means;
    for (std::size_t i = 0; i < out.a_values.size(); ++i) {
        x[feature_a] = out.a_values[i];
        for (std::size_t j = 0; j < out.b_values.size(); ++j) {
            x[feature_b] = out.b_values[j];
            out.values(Eigen::Index(i), Eigen::Index(j)) = predict_forest(model, x);
        }
    }
    return out;
}

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
    Eigen::VectorXd v(Eigen::Index(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) v[Eigen::Index(i)] = arr[i].get<double>();
    return v;
}

} // namespace

std::string forest_to_json(const ForestModel& model, bool include_bag_masks) {
    json trees = json::array();
    for (const auto& tree : model.trees) trees.push_back(json::parse(tree_to_json(tree)));

    json dates = json::array();
    for (const auto d : model.training_dates) dates.push_back(format_date(d));

    json doc = {
        {"format", "epforest-forest"},
        {"version", 1},
        {"options",
         {{"n_trees", model.options.n_trees},
          {"min_node_size", model.options.min_node_size},
          {"features_per_split", model.options.features_per_split},
          {"max_depth", model.options.max_depth},
          {"sampling",
           model.options.sampling == SamplingMode::Bootstrap ? "bootstrap" : "subsample"},
          {"seed", model.options.seed}}},
        {"column_names", model.column_names},
        {"column_means", vector_to_json(model.column_means)},
        {"column_min", vector_to_json(model.column_min)},
        {"column_max", vector_to_json(model.column_max)},
        {"training_dates", dates},
        {"target", model.target},
        {"trees", trees},
    };
    if (include_bag_masks) {
        json masks = json::array();
        for (const auto& mask : model.bag_masks) {
            json m = json::array();
            for (const auto b : mask) m.push_back(int(b));
            masks.push_back(std::move(m));
        }
        doc["bag_masks"] = std::move(masks);
    }
    return doc.dump();
}

ForestModel forest_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("forest JSON parse failure: ") + e.what());
    }
    if (doc.value("format", "") != "epforest-forest" || doc.value("version", 0) != 1)
        throw DataError("not a version-1 epforest-forest document");

    ForestModel model;
    const auto& opts = doc.at("options");
    model.options.n_trees = opts.at("n_trees").get<int>();
    model.options.min_node_size = opts.at("min_node_size").get<int>();
    model.options.features_per_split = opts.at("features_per_split").get<int>();
    model.options.max_depth = opts.at("max_depth").get<int>();
    model.options.sampling = opts.at("sampling").get<std::string>() == "subsample"
                                 ? SamplingMode::Subsample
                                 : SamplingMode::Bootstrap;
    model.options.seed = opts.at("seed").get<std::uint64_t>();
    model.column_names = doc.at("column_names").get<std::vector<std::string>>();
    model.column_means = vector_from_json(doc.at("column_means"));
    model.column_min = vector_from_json(doc.at("column_min"));
    model.column_max = vector_from_json(doc.at("column_max"));
    for (const auto& d : doc.at("training_dates"))
        model.training_dates.push_back(parse_date(d.get<std::string>()));
    model.target = doc.at("target").get<std::string>();
    for (const auto& jt : doc.at("trees")) model.trees.push_back(tree_from_json(jt.dump()));
    if (doc.contains("bag_masks")) {
        for (const auto& jm : doc.at("bag_masks")) {
            std::vector<std::uint8_t> mask;
            mask.reserve(jm.size());
            for (const auto& b : jm) mask.push_back(std::uint8_t(b.get<int>()));
            model.bag_masks.push_back(std::move(mask));
        }
    }
    return model;
}

void write_importance_csv(const std::vector<std::pair<std::string, ImportanceTable>>& rows,
                          std::ostream& out, const std::vector<std::string>& header_lines) {
    for (const auto& h : header_lines) out << "# " << h << '\n';
    out << "label";
    if (!rows.empty())
        for (const auto& name : rows.front().second.names) out << ',' << name;
    out << '\n';
    char buf[64];
    for (const auto& [label, table] : rows) {
        out << label;
        for (Eigen::Index i = 0; i < table.values.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.6f", table.values[i]);
            out << ',' << buf;
        }
        out << '\n';
    }
}

void write_partial_grid_csv(const PartialGrid& grid, const std::string& a_name,
                            const std::string& b_name, std::ostream& out,
                            const std::vector<std::string>& header_lines) {
    for (const auto& h : header_lines) out << "# " << h << '\n';
    out << a_name << ',' << b_name << ",prediction\n";
    char buf[64];
    const auto emit = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.10g", v);
        out << buf;
    };
    for (std::size_t i = 0; i < grid.a_values.size(); ++i) {
        for (std::size_t j = 0; j < grid.b_values.size(); ++j) {
            emit(grid.a_values[i]);
            out << ',';
            emit(grid.b_values[j]);
            out << ',';
            emit(grid.values(Eigen::Index(i), Eigen::Index(j)));
            out << '\n';
        }
    }
}

} // namespace epf
