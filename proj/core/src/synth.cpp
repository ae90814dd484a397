#include "epforest/synth.hpp"

#include "epforest/errors.hpp"
#include "epforest/features.hpp"
#include "epforest/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace epf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kSeasonPeriod = 260; // working days per year, roughly

// Fixed stream ids so adding draws to one column never shifts another.
enum Stream : std::uint64_t {
    kPermit = 0,
    kOil,
    kCoal,
    kNatgas,
    kRate,
    kVix,
    kCpi,
    kEurusd,
    kQwind,
    kTemp,
    kSun,
    kBaseNoise,
    kBaseJump,
    kPeakNoise,
    kPeakJump,
    kRegime,
    kBaseLevelNoise,
    kPeakLevelNoise,
};

const std::vector<std::string>& driver_names() {
    static const std::vector<std::string> names = {"permit", "oil",    "coal", "natgas",
                                                   "i",      "vix",    "cpi",  "eurusd"};
    return names;
}

Stream driver_stream(const std::string& name) {
    if (name == "permit") return kPermit;
    if (name == "oil") return kOil;
    if (name == "coal") return kCoal;
    if (name == "natgas") return kNatgas;
    if (name == "i") return kRate;
    if (name == "vix") return kVix;
    if (name == "cpi") return kCpi;
    return kEurusd;
}

// vol_scale[t] widens the daily shock during stress regimes; pass {} for a
// homoskedastic walk.
std::vector<double> simulate_grw(const DriverProcess& process, int n, std::uint64_t seed,
                                 const std::vector<double>& vol_scale = {}) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> path(static_cast<std::size_t>(n));
    double log_level = std::log(process.initial);
    path[0] = process.initial;
    for (int t = 1; t < n; ++t) {
        const double scale = vol_scale.empty() ? 1.0 : vol_scale[std::size_t(t)];
        log_level += process.drift + process.vol * scale * gauss(rng);
        path[std::size_t(t)] = std::exp(log_level);
    }
    return path;
}

// Two-state Markov chain of shared commodity stress: calm vol vs widened vol.
std::vector<double> simulate_stress_scale(const ScenarioSpec& spec, int n, std::uint64_t seed) {
    std::vector<double> scale(static_cast<std::size_t>(n), 1.0);
    if (spec.stress_enter <= 0.0 || spec.stress_vol_multiplier == 1.0) return scale;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    bool stressed = false;
    for (int t = 0; t < n; ++t) {
        const double u = unit(rng);
        if (stressed) {
            if (u < spec.stress_exit) stressed = false;
        } else {
            if (u < spec.stress_enter) stressed = true;
        }
        if (stressed) scale[std::size_t(t)] = spec.stress_vol_multiplier;
    }
    return scale;
}

std::vector<double> simulate_weather(const WeatherProcess& process, int n, std::uint64_t seed,
                                     double clamp_lo, double clamp_hi) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> path(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        const double season = process.amplitude *
                              std::sin(2.0 * std::numbers::pi * double(t % kSeasonPeriod) /
                                           double(kSeasonPeriod) +
                                       process.phase);
        double v = process.level + season + process.noise * gauss(rng);
        v = std::clamp(v, clamp_lo, clamp_hi);
        path[std::size_t(t)] = v;
    }
    return path;
}

int poisson_count(std::mt19937_64& rng, double mean) {
    std::poisson_distribution<int> dist(mean);
    return dist(rng);
}

void require(bool ok, const std::string& field, const std::string& why) {
    if (!ok) throw ConfigError("scenario field '" + field + "': " + why);
}

} // namespace

void ScenarioSpec::validate() const {
    require(horizon >= 200, "horizon", "must be at least 200 working days");
    require(mean_reversion > 0.0 && mean_reversion <= 1.0, "mean_reversion", "must be in (0, 1]");
    require(long_run_level > 0.0, "long_run_level", "must be positive");
    require(peak_premium > 0.0, "peak_premium", "must be positive");
    require(daily_vol >= 0.0, "daily_vol", "must be nonnegative");
    require(jump_intensity >= 0.0, "jump_intensity", "must be nonnegative");
    require(jump_vol >= 0.0, "jump_vol", "must be nonnegative");
    require(level_noise >= 0.0, "level_noise", "must be nonnegative");
    require(stress_enter >= 0.0 && stress_enter <= 1.0, "stress_enter", "must be in [0, 1]");
    require(stress_exit >= 0.0 && stress_exit <= 1.0, "stress_exit", "must be in [0, 1]");
    require(stress_vol_multiplier > 0.0, "stress_vol_multiplier", "must be positive");
    for (const auto& name : driver_names())
        require(drivers.count(name) == 1, "driver." + name, "missing process parameters");
    for (const auto& [name, process] : drivers) {
        require(std::find(driver_names().begin(), driver_names().end(), name) !=
                    driver_names().end(),
                "driver." + name, "unknown driver");
        require(process.initial > 0.0, "driver." + name + ".initial", "must be positive");
        require(process.vol >= 0.0, "driver." + name + ".vol", "must be nonnegative");
    }
    for (const auto& name : {"qwind", "temp", "sun"})
        require(weather.count(name) == 1, std::string("weather.") + name,
                "missing process parameters");
    for (const auto& [name, process] : weather) {
        require(name == "qwind" || name == "temp" || name == "sun", "weather." + name,
                "unknown weather variable");
        require(process.noise >= 0.0, "weather." + name + ".noise", "must be nonnegative");
    }
    for (const auto& [name, value] : linear_effects) {
        (void)value;
        const auto& valid = predictor_names();
        require(std::find(valid.begin(), valid.end(), name) != valid.end() && name != "day_week",
                "beta." + name, "not a plantable predictor");
    }
}

ScenarioSpec ScenarioSpec::defaults() {
    ScenarioSpec spec;
    spec.linear_effects = {
        {"reversal", -0.5}, {"natgas", 0.5}, {"permit", 0.3}, {"oil", 0.10}, {"coal", 0.08}};
    spec.drivers = {
        {"permit", {25.0, 0.0, 0.040}}, {"oil", {70.0, 0.0, 0.018}},
        {"coal", {80.0, 0.0, 0.018}},   {"natgas", {20.0, 0.0, 0.040}},
        {"i", {0.5, 0.0, 0.010}},       {"vix", {18.0, 0.0, 0.040}},
        {"cpi", {100.0, 8e-5, 0.001}},  {"eurusd", {1.15, 0.0, 0.004}},
    };
    spec.weather = {
        {"qwind", {6.0, 2.5, 1.2, std::numbers::pi / 2}},
        {"temp", {10.0, 8.0, 2.5, -std::numbers::pi / 2}},
        {"sun", {6.0, 4.0, 1.5, -std::numbers::pi / 2}},
    };
    return spec;
}

DailyPanel generate(const ScenarioSpec& spec) {
    spec.validate();
    const int n = spec.horizon;

    const auto stress = simulate_stress_scale(spec, n, derive_seed(spec.seed, kRegime));
    const auto stressed = [](const std::string& name) {
        return name == "permit" || name == "oil" || name == "coal" || name == "natgas";
    };

    std::map<std::string, std::vector<double>> series; // EUR terms for dollar drivers
    for (const auto& name : driver_names())
        series[name] = simulate_grw(spec.drivers.at(name), n,
                                    derive_seed(spec.seed, driver_stream(name)),
                                    stressed(name) ? stress : std::vector<double>{});
    series["qwind"] = simulate_weather(spec.weather.at("qwind"), n, derive_seed(spec.seed, kQwind),
                                       0.0, std::numeric_limits<double>::infinity());
    series["temp"] = simulate_weather(spec.weather.at("temp"), n, derive_seed(spec.seed, kTemp),
                                      -std::numeric_limits<double>::infinity(),
                                      std::numeric_limits<double>::infinity());
    series["sun"] =
        simulate_weather(spec.weather.at("sun"), n, derive_seed(spec.seed, kSun), 0.0, 24.0);

    // Transform bases matching the default FeatureSpec: planted coefficients
    // on daily basis increments telescope to the 22-day features.
    std::map<std::string, std::vector<double>> basis;
    for (const auto& name : {"permit", "oil", "coal", "natgas", "cpi"}) {
        std::vector<double> b(static_cast<std::size_t>(n));
        for (int t = 0; t < n; ++t) b[std::size_t(t)] = std::log(series[name][std::size_t(t)]);
        basis[name] = std::move(b);
    }
    basis["i"] = series["i"];
    basis["vix"] = series["vix"];
    basis["temp"] = series["temp"];
    basis["qwind"] = rolling_mean(series["qwind"]);
    basis["suntime"] = rolling_mean(series["sun"]);

    // Interaction runs on the same 22-day changes the pipeline computes.
    std::vector<double> interaction(static_cast<std::size_t>(n), 0.0);
    for (int t = 22; t < n; ++t) {
        const double dp = basis["permit"][std::size_t(t)] - basis["permit"][std::size_t(t - 22)];
        const double dg = basis["natgas"][std::size_t(t)] - basis["natgas"][std::size_t(t - 22)];
        interaction[std::size_t(t)] = dp * dg;
    }

    const auto basis_delta = [&](const std::string& name, int t) {
        const auto& b = basis.at(name);
        const double cur = b[std::size_t(t)];
        const double prev = b[std::size_t(t - 1)];
        if (std::isnan(cur) || std::isnan(prev)) return 0.0; // rolling-mean warm-up
        return cur - prev;
    };

    const auto simulate_price = [&](double level, std::uint64_t noise_seed,
                                    std::uint64_t jump_seed, std::uint64_t obs_seed) {
        std::mt19937_64 noise_rng(noise_seed);
        std::mt19937_64 jump_rng(jump_seed);
        std::mt19937_64 obs_rng(obs_seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::normal_distribution<double> jump_size(spec.jump_mean, spec.jump_vol);

        const double log_level = std::log(level);
        std::vector<double> m(static_cast<std::size_t>(n));
        m[0] = log_level;
        for (int t = 1; t < n; ++t) {
            double planted = spec.intercept / 22.0;
            for (const auto& [name, beta] : spec.linear_effects) {
                if (name == "reversal") {
                    if (t >= 23) planted += beta * (m[std::size_t(t - 22)] - m[std::size_t(t - 23)]);
                } else {
                    planted += beta * basis_delta(name, t);
                }
            }
            if (t >= 23)
                planted += spec.interaction_permit_natgas *
                           (interaction[std::size_t(t)] - interaction[std::size_t(t - 1)]);

            double jump = 0.0;
            if (spec.jump_intensity > 0.0) {
                const int jumps = poisson_count(jump_rng, spec.jump_intensity);
                for (int j = 0; j < jumps; ++j) jump += jump_size(jump_rng);
            }

            m[std::size_t(t)] = m[std::size_t(t - 1)] +
                                spec.mean_reversion * (log_level - m[std::size_t(t - 1)]) +
                                planted + spec.daily_vol * gauss(noise_rng) + jump;
        }
        // Observation noise sits on the level only; it does not feed back
        // into the dynamics.
        std::vector<double> price(static_cast<std::size_t>(n));
        for (int t = 0; t < n; ++t) {
            const double obs = spec.level_noise > 0.0 ? spec.level_noise * gauss(obs_rng) : 0.0;
            price[std::size_t(t)] = std::exp(m[std::size_t(t)] + obs);
        }
        return price;
    };

    DailyPanel panel;
    panel.dates = working_days_from(spec.start_date, std::size_t(n));
    panel.variables = standard_schema();
    panel.columns.resize(panel.variables.size());

    const auto& fx = series["eurusd"];
    const auto dollar = [&](const std::string& name) {
        std::vector<double> out(static_cast<std::size_t>(n));
        for (int t = 0; t < n; ++t)
            out[std::size_t(t)] = series[name][std::size_t(t)] * fx[std::size_t(t)];
        return out;
    };

    panel.column("base") =
        simulate_price(spec.long_run_level, derive_seed(spec.seed, kBaseNoise),
                       derive_seed(spec.seed, kBaseJump), derive_seed(spec.seed, kBaseLevelNoise));
    panel.column("peak") =
        simulate_price(spec.long_run_level * spec.peak_premium,
                       derive_seed(spec.seed, kPeakNoise), derive_seed(spec.seed, kPeakJump),
                       derive_seed(spec.seed, kPeakLevelNoise));
    panel.column("permit") = series["permit"];
    panel.column("oil") = dollar("oil");
    panel.column("coal") = dollar("coal");
    panel.column("natgas") = dollar("natgas");
    panel.column("qwind") = series["qwind"];
    panel.column("temp") = series["temp"];
    panel.column("sun") = series["sun"];
    panel.column("eurusd") = series["eurusd"];
    panel.column("i") = series["i"];
    panel.column("vix") = series["vix"];

    if (spec.cpi_monthly_anchors) {
        std::vector<double> cpi(static_cast<std::size_t>(n), kNaN);
        for (int t = 0; t < n; ++t) {
            const std::chrono::year_month_day cur{panel.dates[std::size_t(t)]};
            const bool anchor =
                t == 0 || cur.month() != std::chrono::year_month_day{
                                             panel.dates[std::size_t(t - 1)]}.month();
            if (anchor) cpi[std::size_t(t)] = series["cpi"][std::size_t(t)];
        }
        panel.column("cpi") = std::move(cpi);
    } else {
        panel.column("cpi") = series["cpi"];
    }
    return panel;
}

double ground_truth(const ScenarioSpec& spec, const Eigen::VectorXd& point) {
    const auto& names = predictor_names();
    if (point.size() != Eigen::Index(names.size()))
        throw ConfigError("ground_truth: point must have 12 entries");
    const auto index_of = [&](const std::string& name) {
        return Eigen::Index(std::find(names.begin(), names.end(), name) - names.begin());
    };
    double value = spec.intercept;
    for (const auto& [name, beta] : spec.linear_effects) value += beta * point[index_of(name)];
    value += spec.interaction_permit_natgas * point[index_of("permit")] *
             point[index_of("natgas")];
    return value;
}

namespace {

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("scenario field '" + key + "': cannot parse number '" + value + "'");
    }
}

} // namespace

ScenarioSpec ScenarioSpec::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario '" + path.string() + "'");
    ScenarioSpec spec = defaults();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = strip(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        const std::string key = strip(text.substr(0, eq));
        const std::string value = strip(text.substr(eq + 1));

        if (key == "horizon")
            spec.horizon = int(to_double(key, value));
        else if (key == "start")
            spec.start_date = parse_date(value);
        else if (key == "seed")
            spec.seed = std::uint64_t(to_double(key, value));
        else if (key == "mean_reversion")
            spec.mean_reversion = to_double(key, value);
        else if (key == "long_run_level")
            spec.long_run_level = to_double(key, value);
        else if (key == "peak_premium")
            spec.peak_premium = to_double(key, value);
        else if (key == "daily_vol")
            spec.daily_vol = to_double(key, value);
        else if (key == "level_noise")
            spec.level_noise = to_double(key, value);
        else if (key == "jump_intensity")
            spec.jump_intensity = to_double(key, value);
        else if (key == "jump_mean")
            spec.jump_mean = to_double(key, value);
        else if (key == "jump_vol")
            spec.jump_vol = to_double(key, value);
        else if (key == "intercept")
            spec.intercept = to_double(key, value);
        else if (key == "stress_enter")
            spec.stress_enter = to_double(key, value);
        else if (key == "stress_exit")
            spec.stress_exit = to_double(key, value);
        else if (key == "stress_vol_multiplier")
            spec.stress_vol_multiplier = to_double(key, value);
        else if (key == "interaction")
            spec.interaction_permit_natgas = to_double(key, value);
        else if (key == "cpi_monthly")
            spec.cpi_monthly_anchors = value == "true" || value == "1";
        else if (key.rfind("beta.", 0) == 0)
            spec.linear_effects[key.substr(5)] = to_double(key, value);
        else if (key.rfind("driver.", 0) == 0) {
            const auto rest = key.substr(7);
            const auto dot = rest.find('.');
            if (dot == std::string::npos)
                throw ConfigError("scenario field '" + key + "': expected driver.<name>.<field>");
            const std::string name = rest.substr(0, dot);
            const std::string field = rest.substr(dot + 1);
            auto& process = spec.drivers[name];
            if (field == "initial")
                process.initial = to_double(key, value);
            else if (field == "drift")
                process.drift = to_double(key, value);
            else if (field == "vol")
                process.vol = to_double(key, value);
            else
                throw ConfigError("scenario field '" + key + "': unknown driver field");
        } else if (key.rfind("weather.", 0) == 0) {
            const auto rest = key.substr(8);
            const auto dot = rest.find('.');
            if (dot == std::string::npos)
                throw ConfigError("scenario field '" + key + "': expected weather.<name>.<field>");
            const std::string name = rest.substr(0, dot);
            const std::string field = rest.substr(dot + 1);
            auto& process = spec.weather[name];
            if (field == "level")
                process.level = to_double(key, value);
            else if (field == "amplitude")
                process.amplitude = to_double(key, value);
            else if (field == "noise")
                process.noise = to_double(key, value);
            else if (field == "phase")
                process.phase = to_double(key, value);
            else
                throw ConfigError("scenario field '" + key + "': unknown weather field");
        } else {
            throw ConfigError("scenario field '" + key + "': unknown key");
        }
    }
    spec.validate();
    return spec;
}

void ScenarioSpec::save(std::ostream& out) const {
    char buf[64];
    const auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v); // exact double round-trip
        return std::string(buf);
    };
    out << "horizon = " << horizon << '\n';
    out << "start = " << format_date(start_date) << '\n';
    out << "seed = " << seed << '\n';
    out << "mean_reversion = " << num(mean_reversion) << '\n';
    out << "long_run_level = " << num(long_run_level) << '\n';
    out << "peak_premium = " << num(peak_premium) << '\n';
    out << "daily_vol = " << num(daily_vol) << '\n';
    out << "level_noise = " << num(level_noise) << '\n';
    out << "jump_intensity = " << num(jump_intensity) << '\n';
    out << "jump_mean = " << num(jump_mean) << '\n';
    out << "jump_vol = " << num(jump_vol) << '\n';
    out << "intercept = " << num(intercept) << '\n';
    out << "stress_enter = " << num(stress_enter) << '\n';
    out << "stress_exit = " << num(stress_exit) << '\n';
    out << "stress_vol_multiplier = " << num(stress_vol_multiplier) << '\n';
    out << "interaction = " << num(interaction_permit_natgas) << '\n';
    out << "cpi_monthly = " << (cpi_monthly_anchors ? "true" : "false") << '\n';
    for (const auto& [name, beta] : linear_effects)
        out << "beta." << name << " = " << num(beta) << '\n';
    for (const auto& [name, process] : drivers) {
        out << "driver." << name << ".initial = " << num(process.initial) << '\n';
        out << "driver." << name << ".drift = " << num(process.drift) << '\n';
        out << "driver." << name << ".vol = " << num(process.vol) << '\n';
    }
    for (const auto& [name, process] : weather) {
        out << "weather." << name << ".level = " << num(process.level) << '\n';
        out << "weather." << name << ".amplitude = " << num(process.amplitude) << '\n';
        out << "weather." << name << ".noise = " << num(process.noise) << '\n';
        out << "weather." << name << ".phase = " << num(process.phase) << '\n';
    }
}

} // namespace epf
