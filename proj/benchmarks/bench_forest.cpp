#include "epforest/baselines.hpp"
#include "epforest/features.hpp"
#include "epforest/forest.hpp"
#include "epforest/panel.hpp"
#include "epforest/synth.hpp"
#include "epforest/tree.hpp"

#include <benchmark/benchmark.h>

#include <numeric>

namespace {

// Full-scale design matrix, built once and shared across benchmarks.
const epf::DesignMatrix& benchmark_design() {
    static const epf::DesignMatrix design = [] {
        epf::ScenarioSpec spec = epf::ScenarioSpec::defaults();
        spec.horizon = 2668; // 2,624 rows after warm-up
        auto panel = epf::convert_to_eur(
            epf::fill_gaps(epf::generate(spec), epf::FillPolicy::ForwardFill));
        return epf::build_design(panel, epf::FeatureSpec::defaults(), "base");
    }();
    return design;
}

void BM_BuildDesign(benchmark::State& state) {
    epf::ScenarioSpec spec = epf::ScenarioSpec::defaults();
    spec.horizon = 2668;
    const auto panel =
        epf::convert_to_eur(epf::fill_gaps(epf::generate(spec), epf::FillPolicy::ForwardFill));
    for (auto _ : state) {
        auto design = epf::build_design(panel, epf::FeatureSpec::defaults(), "base");
        benchmark::DoNotOptimize(design);
    }
}
BENCHMARK(BM_BuildDesign)->Unit(benchmark::kMillisecond);

void BM_BestSplit(benchmark::State& state) {
    const auto& design = benchmark_design();
    std::vector<int> features(std::size_t(design.cols()));
    std::iota(features.begin(), features.end(), 0);
    for (auto _ : state) {
        auto split = epf::best_split(design.X, design.y, features);
        benchmark::DoNotOptimize(split);
    }
}
BENCHMARK(BM_BestSplit)->Unit(benchmark::kMillisecond);

void BM_FitTree(benchmark::State& state) {
    const auto& design = benchmark_design();
    epf::TreeOptions options;
    options.min_node_size = int(state.range(0));
    options.features_per_split = 4;
    for (auto _ : state) {
        auto tree = epf::fit_tree(design.X, design.y, options);
        benchmark::DoNotOptimize(tree);
    }
}
BENCHMARK(BM_FitTree)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_FitForest(benchmark::State& state) {
    const auto& design = benchmark_design();
    epf::ForestOptions options;
    options.n_trees = int(state.range(0));
    options.min_node_size = 10;
    options.n_threads = int(state.range(1));
    for (auto _ : state) {
        auto model = epf::fit_forest(design, options);
        benchmark::DoNotOptimize(model);
    }
}
BENCHMARK(BM_FitForest)->Args({100, 1})->Args({100, 2})->Args({1000, 0})
    ->Unit(benchmark::kMillisecond);

void BM_PredictForest(benchmark::State& state) {
    const auto& design = benchmark_design();
    epf::ForestOptions options;
    options.n_trees = 1000;
    options.min_node_size = 10;
    options.n_threads = 0;
    static const epf::ForestModel model = epf::fit_forest(design, options);
    const Eigen::VectorXd x = model.column_means;
    for (auto _ : state) {
        benchmark::DoNotOptimize(epf::predict_forest(model, x));
    }
}
BENCHMARK(BM_PredictForest);

void BM_OobPredict(benchmark::State& state) {
    const auto& design = benchmark_design();
    epf::ForestOptions options;
    options.n_trees = 200;
    options.min_node_size = 10;
    options.n_threads = 0;
    static const epf::ForestModel model = epf::fit_forest(design, options);
    for (auto _ : state) {
        auto oob = epf::oob_predict(model, design);
        benchmark::DoNotOptimize(oob);
    }
}
BENCHMARK(BM_OobPredict)->Unit(benchmark::kMillisecond);

void BM_FitOls(benchmark::State& state) {
    const auto& design = benchmark_design();
    for (auto _ : state) {
        auto fit = epf::fit_ols(design.X, design.y, design.column_names);
        benchmark::DoNotOptimize(fit);
    }
}
BENCHMARK(BM_FitOls)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
