#include "epforest/errors.hpp"
#include "epforest/features.hpp"
#include "epforest/synth.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace epf;

namespace {

// Gap-free panel ready for build_design, via the synthetic generator.
DailyPanel small_panel(int days, std::uint64_t seed = 3) {
    ScenarioSpec spec = ScenarioSpec::defaults();
    spec.horizon = std::max(days, 200);
    spec.seed = seed;
    spec.cpi_monthly_anchors = false;
    auto panel = generate(spec);
    if (days < spec.horizon) {
        panel = filter_dates(panel, panel.dates[0], panel.dates[std::size_t(days - 1)]);
    }
    return panel;
}

} // namespace

TEST_SUITE("features") {

TEST_CASE("rolling mean of a constant is the constant") {
    const std::vector<double> series(40, 3.25);
    const auto out = rolling_mean(series, 22);
    for (std::size_t t = 0; t < 21; ++t) CHECK(std::isnan(out[t]));
    for (std::size_t t = 21; t < out.size(); ++t) CHECK(out[t] == doctest::Approx(3.25));
}

TEST_CASE("rolling mean of 1..22 ends at 11.5") {
    std::vector<double> series(22);
    for (int i = 0; i < 22; ++i) series[std::size_t(i)] = double(i + 1);
    const auto out = rolling_mean(series, 22);
    CHECK(out.back() == doctest::Approx(11.5));
}

TEST_CASE("rolling mean matches the direct-summation oracle") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> value(-10.0, 10.0);
    std::vector<double> series(100);
    for (auto& v : series) v = value(rng);
    const auto out = rolling_mean(series, 22);
    for (std::size_t t = 21; t < series.size(); ++t) {
        double sum = 0.0;
        for (std::size_t s = t + 1 - 22; s <= t; ++s) sum += series[s];
        CHECK(out[t] == doctest::Approx(sum / 22.0).epsilon(1e-12));
    }
}

TEST_CASE("rolling mean rejects windows longer than the series") {
    CHECK_THROWS_AS(rolling_mean(std::vector<double>(10, 1.0), 22), DataError);
}

TEST_CASE("rolling mean commutes with affine maps") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> value(0.0, 5.0);
    std::vector<double> series(60), mapped(60);
    const double a = 2.5, b = -7.0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        series[t] = value(rng);
        mapped[t] = a * series[t] + b;
    }
    const auto lhs = rolling_mean(mapped, 22);
    const auto rhs = rolling_mean(series, 22);
    for (std::size_t t = 21; t < series.size(); ++t)
        CHECK(lhs[t] == doctest::Approx(a * rhs[t] + b).epsilon(1e-12));
}

TEST_CASE("22-day change of a constant series is zero") {
    const std::vector<double> series(50, 4.0);
    for (const auto kind : {ChangeKind::LogDiff, ChangeKind::Diff}) {
        const auto out = change_22(series, kind);
        for (std::size_t t = 22; t < out.size(); ++t) CHECK(out[t] == doctest::Approx(0.0));
    }
}

TEST_CASE("ratio of e over 22 days gives log change one") {
    std::vector<double> series(44);
    for (int t = 0; t < 44; ++t) series[std::size_t(t)] = std::exp(double(t) / 22.0);
    const auto out = change_22(series, ChangeKind::LogDiff);
    for (std::size_t t = 22; t < out.size(); ++t) CHECK(out[t] == doctest::Approx(1.0));
}

TEST_CASE("changes match the direct-indexing oracle") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> value(0.5, 9.0);
    std::vector<double> series(80);
    for (auto& v : series) v = value(rng);
    const auto log_out = change_22(series, ChangeKind::LogDiff);
    const auto diff_out = change_22(series, ChangeKind::Diff);
    for (std::size_t t = 22; t < series.size(); ++t) {
        CHECK(log_out[t] == doctest::Approx(std::log(series[t]) - std::log(series[t - 22])));
        CHECK(diff_out[t] == doctest::Approx(series[t] - series[t - 22]));
    }
}

TEST_CASE("log change rejects non-positive values") {
    std::vector<double> series(30, 2.0);
    series[7] = 0.0;
    CHECK_THROWS_AS(change_22(series, ChangeKind::LogDiff), NumericError);
    CHECK_NOTHROW(change_22(series, ChangeKind::Diff));
}

TEST_CASE("simple 22-day change is linear in the series") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> value(-4.0, 4.0);
    std::vector<double> u(60), v(60), combo(60);
    const double a = 1.5, b = -0.25;
    for (std::size_t t = 0; t < u.size(); ++t) {
        u[t] = value(rng);
        v[t] = value(rng);
        combo[t] = a * u[t] + b * v[t];
    }
    const auto cu = change_22(u, ChangeKind::Diff);
    const auto cv = change_22(v, ChangeKind::Diff);
    const auto cc = change_22(combo, ChangeKind::Diff);
    for (std::size_t t = 22; t < u.size(); ++t)
        CHECK(cc[t] == doctest::Approx(a * cu[t] + b * cv[t]).epsilon(1e-12));
}

TEST_CASE("feature spec defaults cover the canonical columns") {
    const auto spec = FeatureSpec::defaults();
    REQUIRE(spec.features.size() == 12);
    for (std::size_t c = 0; c < 12; ++c) CHECK(spec.features[c].first == predictor_names()[c]);
    CHECK(spec.recipe("suntime").source == "sun");
    CHECK(spec.recipe("qwind").transform == Transform::MeanDiff22);
}

TEST_CASE("feature spec round-trips through its config format") {
    const auto dir = helpers::temp_dir("features");
    auto spec = FeatureSpec::defaults();
    spec.recipe("temp").transform = Transform::LogDiff22;
    spec.target_transform = Transform::Diff22;
    std::ostringstream out;
    spec.save(out);
    const auto path = helpers::write_file(dir / "spec.conf", out.str());
    const auto loaded = FeatureSpec::load(path);
    CHECK(loaded.recipe("temp").transform == Transform::LogDiff22);
    CHECK(loaded.target_transform == Transform::Diff22);

    helpers::write_file(dir / "bad.conf", "temp = warp-drive\n");
    CHECK_THROWS_AS(FeatureSpec::load(dir / "bad.conf"), ConfigError);
    helpers::write_file(dir / "bad2.conf", "bogus_feature = level\n");
    CHECK_THROWS_AS(FeatureSpec::load(dir / "bad2.conf"), ConfigError);
}

TEST_CASE("design consumes exactly 44 warm-up rows under the defaults") {
    const int days = 44 + 22;
    const auto panel = small_panel(days);
    const auto design = build_design(panel, FeatureSpec::defaults(), "base", 1);
    CHECK(design.rows() == days - 44);
    CHECK(design.dates.size() == std::size_t(days - 44));
    CHECK(design.dates.back() == panel.dates.back());
}

TEST_CASE("base and peak share X except the reversal column") {
    const auto panel = small_panel(200);
    const auto spec = FeatureSpec::defaults();
    const auto base = build_design(panel, spec, "base", 1);
    const auto peak = build_design(panel, spec, "peak", 1);
    REQUIRE(base.rows() == peak.rows());
    const int reversal = base.column_index("reversal");
    REQUIRE(reversal >= 0);
    for (Eigen::Index c = 0; c < base.cols(); ++c) {
        if (int(c) == reversal) continue;
        CHECK((base.X.col(c).array() == peak.X.col(c).array()).all());
    }
    CHECK(!(base.y.array() == peak.y.array()).all());
    CHECK(!(base.X.col(reversal).array() == peak.X.col(reversal).array()).all());
}

TEST_CASE("day_week column stays within 1..5") {
    const auto panel = small_panel(150);
    const auto design = build_design(panel, FeatureSpec::defaults(), "base", 1);
    const int col = design.column_index("day_week");
    for (Eigen::Index r = 0; r < design.rows(); ++r) {
        CHECK(design.X(r, col) >= 1.0);
        CHECK(design.X(r, col) <= 5.0);
        CHECK(design.X(r, col) == std::floor(design.X(r, col)));
    }
}

TEST_CASE("reversal is the lagged target change") {
    const auto panel = small_panel(200);
    const auto design = build_design(panel, FeatureSpec::defaults(), "base", 1);
    const int reversal = design.column_index("reversal");
    // Row t's reversal equals row t-22's y once both rows survive warm-up.
    for (Eigen::Index r = 22; r < design.rows(); ++r)
        CHECK(design.X(r, reversal) == doctest::Approx(design.y[r - 22]).epsilon(1e-12));
}

TEST_CASE("build_design is deterministic") {
    const auto panel = small_panel(220);
    const auto a = build_design(panel, FeatureSpec::defaults(), "base", 1);
    const auto b = build_design(panel, FeatureSpec::defaults(), "base", 1);
    CHECK((a.X.array() == b.X.array()).all());
    CHECK((a.y.array() == b.y.array()).all());
    CHECK(a.dates == b.dates);
}

TEST_CASE("design dates are a suffix of the panel dates") {
    const auto panel = small_panel(210);
    const auto design = build_design(panel, FeatureSpec::defaults(), "base", 1);
    const std::size_t offset = panel.rows() - design.dates.size();
    for (std::size_t r = 0; r < design.dates.size(); ++r)
        CHECK(design.dates[r] == panel.dates[offset + r]);
}

TEST_CASE("build_design enforces the row floor") {
    const auto panel = small_panel(120);
    CHECK_THROWS_AS(build_design(panel, FeatureSpec::defaults(), "base", 100), DataError);
    CHECK_NOTHROW(build_design(panel, FeatureSpec::defaults(), "base", 50));
}

TEST_CASE("rolling-mean level and smoothed log-change transforms") {
    // The alternative "averages" path: features built from 22-day rolling
    // means instead of raw daily values.
    const auto panel = small_panel(200);
    auto spec = FeatureSpec::defaults();
    spec.recipe("vix").transform = Transform::RollingMean22;
    spec.recipe("qwind").transform = Transform::MeanLogDiff22;
    const auto design = build_design(panel, spec, "base", 1);

    const auto vix_mean = rolling_mean(panel.column("vix"));
    const auto qwind_change = change_22(rolling_mean(panel.column("qwind")), ChangeKind::LogDiff);
    const std::size_t offset = panel.rows() - std::size_t(design.rows());
    const int vix_col = design.column_index("vix");
    const int qwind_col = design.column_index("qwind");
    for (Eigen::Index r = 0; r < design.rows(); ++r) {
        CHECK(design.X(r, vix_col) == vix_mean[offset + std::size_t(r)]);
        CHECK(design.X(r, qwind_col) == qwind_change[offset + std::size_t(r)]);
    }
}

TEST_CASE("design csv lists date, y, then the canonical columns") {
    const auto panel = small_panel(150);
    const auto design = build_design(panel, FeatureSpec::defaults(), "base", 1);
    std::ostringstream out;
    write_design_csv(design, out, {"tool: test"});
    const std::string text = out.str();
    CHECK(text.find("# tool: test\n") == 0);
    CHECK(text.find("date,y,permit,oil,coal,natgas,i,vix,cpi,qwind,suntime,temp,day_week,"
                    "reversal\n") != std::string::npos);
}

} // TEST_SUITE
