#include "commands.hpp"

#include "epforest/baselines.hpp"
#include "epforest/errors.hpp"
#include "epforest/forest.hpp"
#include "epforest/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

namespace epf::cli {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    std::filesystem::create_directories(path.parent_path().empty() ? "."
                                                                   : path.parent_path());
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    return out;
}

ScenarioSpec scenario_of(const RunConfig& config) {
    if (config.scenario == "default") return ScenarioSpec::defaults();
    return ScenarioSpec::load(config.scenario);
}

ForestOptions forest_options(const RunConfig& config, int min_node, int trees) {
    ForestOptions options;
    options.n_trees = trees;
    options.min_node_size = min_node;
    options.features_per_split = config.mtry;
    options.seed = config.seed;
    options.n_threads = config.threads;
    return options;
}

std::string fmt(double v, const char* spec = "%.6f") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

// AR(1) in the 22-day-change target space: one step is the 22-working-day
// "month", i.e. the reversal column.
LinearFit fit_ar1_baseline(const DesignMatrix& design) {
    const int reversal = design.column_index("reversal");
    if (reversal < 0) throw DataError("design has no reversal column");
    return fit_ols(design.X.col(reversal), design.y, {"reversal"});
}

} // namespace

DailyPanel load_panel(const RunConfig& config) {
    config.validate();
    DailyPanel panel;
    if (!config.scenario.empty()) {
        panel = generate(scenario_of(config));
    } else if (!config.input.empty()) {
        panel = ingest_csv(config.input, standard_schema());
    } else {
        throw ConfigError("either --input or --scenario is required");
    }
    panel = fill_gaps(std::move(panel),
                      config.fill == "linear" ? FillPolicy::Linear : FillPolicy::ForwardFill);
    panel = convert_to_eur(std::move(panel));
    if (config.from || config.to) {
        const Date lo = config.from.value_or(panel.dates.front());
        const Date hi = config.to.value_or(panel.dates.back());
        panel = filter_dates(std::move(panel), lo, hi);
    }
    return panel;
}

DesignMatrix load_design(const RunConfig& config, const DailyPanel& panel) {
    const FeatureSpec spec = config.feature_spec.empty() ? FeatureSpec::defaults()
                                                         : FeatureSpec::load(config.feature_spec);
    return build_design(panel, spec, config.target, config.min_rows);
}

std::vector<std::filesystem::path> run_synth(const RunConfig& config) {
    config.validate();
    const ScenarioSpec spec =
        config.scenario.empty() ? ScenarioSpec::defaults() : scenario_of(config);
    const auto panel = generate(spec);
    const auto path = config.out_dir / "panel.csv";
    auto out = open_output(path);
    write_panel_csv(panel, out, output_header(config, "synth"));
    return {path};
}

std::vector<std::filesystem::path> run_ingest(const RunConfig& config) {
    const auto panel = load_panel(config);
    const auto path = config.out_dir / "panel.csv";
    auto out = open_output(path);
    write_panel_csv(panel, out, output_header(config, "ingest"));
    return {path};
}

std::vector<std::filesystem::path> run_features(const RunConfig& config) {
    const auto panel = load_panel(config);
    const auto design = load_design(config, panel);
    const auto path = config.out_dir / ("design_" + config.target + ".csv");
    auto out = open_output(path);
    write_design_csv(design, out, output_header(config, "features"));
    return {path};
}

std::vector<std::filesystem::path> run_table1(const RunConfig& config) {
    const auto panel = load_panel(config);
    const auto design = load_design(config, panel);

    const auto ar1 = fit_ar1_baseline(design);
    const auto ols = fit_ols(design.X, design.y, design.column_names);

    const auto path = config.out_dir / ("table1_" + config.target + ".csv");
    auto out = open_output(path);
    auto header = output_header(config, "table1");
    header.push_back("target: " + config.target);
    header.push_back("rows: " + std::to_string(design.rows()));
    header.push_back("ar1_in_sample_rmse: " + fmt(ar1.rmse));
    header.push_back("ols_in_sample_rmse: " + fmt(ols.rmse));
    for (const auto& line : header) out << "# " << line << '\n';

    out << "min_node,trees,rf_in_sample_rmse,rf_oob_rmse,rmse_ratio_vs_ols\n";
    for (const int min_node : config.min_node_sizes) {
        for (const int trees : config.tree_counts) {
            const auto model = fit_forest(design, forest_options(config, min_node, trees));
            const double in_sample = rmse(predict_rows(model, design), design.y);
            const double oob = rmse(oob_predict(model, design), design.y);
            const auto ratio = compare({{"rf", in_sample}}, {"ols", ols.rmse}).rows.front().ratio;
            out << min_node << ',' << trees << ',' << fmt(in_sample) << ',' << fmt(oob) << ','
                << fmt(ratio, "%.3f") << '\n';
        }
    }
    return {path};
}

std::vector<std::filesystem::path> run_importance(const RunConfig& config) {
    const auto panel = load_panel(config);

    std::vector<std::pair<std::string, std::pair<Date, Date>>> ranges;
    if (config.ranges.empty()) {
        ranges.emplace_back("full", std::make_pair(panel.dates.front(), panel.dates.back()));
    } else {
        for (const auto& [lo, hi] : config.ranges)
            ranges.emplace_back(format_date(lo) + ".." + format_date(hi), std::make_pair(lo, hi));
    }

    std::vector<std::pair<std::string, ImportanceTable>> rows;
    for (const auto& [label, range] : ranges) {
        const auto slice = filter_dates(panel, range.first, range.second);
        const auto design = load_design(config, slice);
        const auto model = fit_forest(
            design, forest_options(config, config.min_node_sizes.front(),
                                   config.tree_counts.front()));
        rows.emplace_back(label, importance(model));
    }

    const auto path = config.out_dir / ("importance_" + config.target + ".csv");
    auto out = open_output(path);
    auto header = output_header(config, "importance");
    header.push_back("target: " + config.target);
    write_importance_csv(rows, out, header);
    return {path};
}

std::vector<std::filesystem::path> run_pdp(const RunConfig& config) {
    const auto panel = load_panel(config);
    const auto design = load_design(config, panel);

    const auto feature_index = [&](const std::string& name) {
        const int index = design.column_index(name);
        if (index < 0) {
            std::string valid;
            for (const auto& n : design.column_names) {
                if (!valid.empty()) valid += ", ";
                valid += n;
            }
            throw ConfigError("unknown feature '" + name + "' (valid: " + valid + ")");
        }
        return index;
    };
    const int a = feature_index(config.feature_a);
    const int b = feature_index(config.feature_b);

    const auto model = fit_forest(design, forest_options(config, config.min_node_sizes.front(),
                                                         config.tree_counts.front()));
    GridSpec grid;
    grid.a_points = config.grid_points;
    grid.b_points = config.grid_points;
    const auto surface = partial_grid(model, a, b, grid);

    const auto path = config.out_dir /
                      ("pdp_" + config.target + "_" + config.feature_a + "_" + config.feature_b +
                       ".csv");
    auto out = open_output(path);
    auto header = output_header(config, "pdp");
    header.push_back("target: " + config.target);
    write_partial_grid_csv(surface, config.feature_a, config.feature_b, out, header);
    return {path};
}

std::vector<std::filesystem::path> run_curve(const RunConfig& config) {
    const auto panel = load_panel(config);
    const auto design = load_design(config, panel);

    const int trees = config.tree_counts.front();
    const auto model =
        fit_forest(design, forest_options(config, config.min_node_sizes.front(), trees));

    std::vector<int> checkpoints;
    for (const int k : {1, 5, 10, 25, 50, 100, 250, 500, 1000})
        if (k <= trees) checkpoints.push_back(k);
    const auto curve = error_curve(model, design, checkpoints);

    const auto path = config.out_dir / ("curve_" + config.target + ".csv");
    auto out = open_output(path);
    for (const auto& line : output_header(config, "curve")) out << "# " << line << '\n';
    out << "trees,oob_mse\n";
    for (const auto& [k, mse] : curve) out << k << ',' << fmt(mse, "%.8f") << '\n';
    return {path};
}

std::vector<std::filesystem::path> run_baselines(const RunConfig& config) {
    const auto panel = load_panel(config);
    const auto design = load_design(config, panel);

    const auto ar1 = fit_ar1_baseline(design);
    const auto ols = fit_ols(design.X, design.y, design.column_names);

    const auto path = config.out_dir / ("baselines_" + config.target + ".csv");
    auto out = open_output(path);
    auto header = output_header(config, "baselines");
    header.push_back("target: " + config.target);
    header.push_back("rows: " + std::to_string(design.rows()));
    for (const auto& line : header) out << "# " << line << '\n';
    out << "model,term,value\n";
    const auto emit = [&](const std::string& model, const std::string& term, double v) {
        out << model << ',' << term << ',' << fmt(v, "%.10g") << '\n';
    };
    emit("ar1", "intercept", ar1.intercept);
    emit("ar1", "reversal", ar1.coefficients[0]);
    emit("ar1", "rmse", ar1.rmse);
    emit("ols", "intercept", ols.intercept);
    for (std::size_t j = 0; j < ols.names.size(); ++j)
        emit("ols", ols.names[j], ols.coefficients[Eigen::Index(j)]);
    emit("ols", "rmse", ols.rmse);
    return {path};
}

} // namespace epf::cli
