#pragma once

#include "epforest/panel.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace epf {

/// Geometric random walk parameters for one market driver.
struct DriverProcess {
    double initial = 1.0;
    double drift = 0.0; // per working day, in log space
    double vol = 0.0;   // per working day, in log space
};

/// Seasonal sinusoid plus noise for one weather variable.
struct WeatherProcess {
    double level = 0.0;
    double amplitude = 0.0;
    double noise = 0.0;
    double phase = 0.0; // radians; period is 260 working days
};

/// Synthetic market scenario with planted driver effects. The electricity
/// price is a mean-reverting log process with compound-Poisson jumps; the
/// planted linear and interaction terms are applied to daily increments of
/// each driver's transform basis, so over a 22-day window they telescope to
/// exactly the coefficients on the default design-matrix features.
struct ScenarioSpec {
    int horizon = 2600; // working days, >= 200
    Date start_date = parse_date("2012-01-02");
    std::uint64_t seed = 1;

    double mean_reversion = 0.01; // kappa in (0, 1]
    double long_run_level = 45.0; // EUR/MWh
    double peak_premium = 1.10;   // peak long-run level = base level * premium
    double daily_vol = 0.012;
    double level_noise = 0.03;    // iid per-day noise on the log price level
    double jump_intensity = 0.02; // expected jumps per working day
    double jump_mean = 0.0;       // jump size in log space
    double jump_vol = 0.08;

    double intercept = 0.0; // drift of the 22-day target change
    double interaction_permit_natgas = 8.0;
    std::map<std::string, double> linear_effects; // keyed by predictor name

    // Shared commodity stress regime (permit, oil, coal, natgas): a Markov
    // chain that widens daily driver shocks, clustering the large moves the
    // way real energy-market episodes do.
    double stress_enter = 0.0;           // per-day probability calm -> stress (off by default)
    double stress_exit = 0.10;           // per-day probability stress -> calm
    double stress_vol_multiplier = 3.0;  // vol scale while stressed

    std::map<std::string, DriverProcess> drivers;  // permit oil coal natgas i vix cpi eurusd
    std::map<std::string, WeatherProcess> weather; // qwind temp sun
    bool cpi_monthly_anchors = true; // emit cpi only on month starts

    /// Throws ConfigError naming the offending field.
    void validate() const;

    /// Planted scenario: reversal -0.5, natgas 0.5, permit 0.3, a
    /// permit x natgas interaction, and mild oil/coal effects.
    static ScenarioSpec defaults();

    static ScenarioSpec load(const std::filesystem::path& path);
    void save(std::ostream& out) const;
};

/// Simulates the scenario onto a working-day calendar and returns a panel
/// with all 13 source variables, in the exact shape ingest_csv reads back.
/// Fully deterministic given the seed.
DailyPanel generate(const ScenarioSpec& spec);

/// The planted conditional mean of the target change at the given predictor
/// values (canonical 12-column order).
double ground_truth(const ScenarioSpec& spec, const Eigen::VectorXd& point);

} // namespace epf
