#include "epforest/features.hpp"

#include "epforest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace epf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::array<std::pair<const char*, Transform>, 8> kTransformTokens = {{
    {"level", Transform::Level},
    {"diff-22", Transform::Diff22},
    {"log-diff-22", Transform::LogDiff22},
    {"rolling-mean-22", Transform::RollingMean22},
    {"mean-diff-22", Transform::MeanDiff22},
    {"mean-log-diff-22", Transform::MeanLogDiff22},
    {"day-of-week", Transform::DayOfWeek},
    {"reversal", Transform::Reversal},
}};

} // namespace

Transform parse_transform(const std::string& token) {
    for (const auto& [name, t] : kTransformTokens)
        if (token == name) return t;
    std::string valid;
    for (const auto& [name, t] : kTransformTokens) {
        if (!valid.empty()) valid += ", ";
        valid += name;
    }
    throw ConfigError("unknown transform '" + token + "' (valid: " + valid + ")");
}

std::string transform_name(Transform t) {
    for (const auto& [name, tt] : kTransformTokens)
        if (tt == t) return name;
    throw ConfigError("unnamed transform");
}

std::vector<double> rolling_mean(const std::vector<double>& series, int window) {
    if (window <= 0) throw ConfigError("rolling_mean: window must be positive");
    if (std::size_t(window) > series.size())
        throw DataError("rolling_mean: window " + std::to_string(window) + " exceeds length " +
                        std::to_string(series.size()));
    // Direct per-window summation: bit-identical for any suffix of the
    // series, which keeps date-filtered designs exactly aligned.
    std::vector<double> out(series.size(), kNaN);
    for (std::size_t t = std::size_t(window) - 1; t < series.size(); ++t) {
        double sum = 0.0;
        for (std::size_t s = t + 1 - std::size_t(window); s <= t; ++s) sum += series[s];
        out[t] = sum / window;
    }
    return out;
}

std::vector<double> change_22(const std::vector<double>& series, ChangeKind kind, int horizon) {
    if (horizon <= 0) throw ConfigError("change_22: horizon must be positive");
    std::vector<double> out(series.size(), kNaN);
    const std::size_t h = std::size_t(horizon);
    if (kind == ChangeKind::LogDiff) {
        for (std::size_t t = 0; t < series.size(); ++t) {
            if (!std::isnan(series[t]) && series[t] <= 0.0)
                throw NumericError("log change undefined for non-positive value " +
                                   std::to_string(series[t]) + " at index " + std::to_string(t));
        }
        for (std::size_t t = h; t < series.size(); ++t)
            out[t] = std::log(series[t]) - std::log(series[t - h]);
    } else {
        for (std::size_t t = h; t < series.size(); ++t) out[t] = series[t] - series[t - h];
    }
    return out;
}

const std::array<std::string, 12>& predictor_names() {
    static const std::array<std::string, 12> names = {"permit", "oil",   "coal",    "natgas",
                                                      "i",      "vix",   "cpi",     "qwind",
                                                      "suntime", "temp", "day_week", "reversal"};
    return names;
}

const FeatureSpec::Recipe& FeatureSpec::recipe(const std::string& feature) const {
    for (const auto& [name, r] : features)
        if (name == feature) return r;
    throw ConfigError("no feature named '" + feature + "'");
}

FeatureSpec::Recipe& FeatureSpec::recipe(const std::string& feature) {
    for (auto& [name, r] : features)
        if (name == feature) return r;
    throw ConfigError("no feature named '" + feature + "'");
}

FeatureSpec FeatureSpec::defaults() {
    FeatureSpec spec;
    spec.features = {
        {"permit", {"permit", Transform::LogDiff22}},
        {"oil", {"oil", Transform::LogDiff22}},
        {"coal", {"coal", Transform::LogDiff22}},
        {"natgas", {"natgas", Transform::LogDiff22}},
        {"i", {"i", Transform::Diff22}},
        {"vix", {"vix", Transform::Diff22}},
        {"cpi", {"cpi", Transform::LogDiff22}},
        {"qwind", {"qwind", Transform::MeanDiff22}},
        {"suntime", {"sun", Transform::MeanDiff22}},
        {"temp", {"temp", Transform::Diff22}},
        {"day_week", {"", Transform::DayOfWeek}},
        {"reversal", {"", Transform::Reversal}},
    };
    spec.target_transform = Transform::LogDiff22;
    return spec;
}

FeatureSpec FeatureSpec::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open feature spec '" + path.string() + "'");
    FeatureSpec spec = defaults();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string text = strip(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                              ": expected 'variable = transform'");
        const std::string key = strip(text.substr(0, eq));
        const Transform t = parse_transform(strip(text.substr(eq + 1)));
        if (key == "target") {
            if (t != Transform::LogDiff22 && t != Transform::Diff22)
                throw ConfigError("target transform must be log-diff-22 or diff-22");
            spec.target_transform = t;
        } else {
            spec.recipe(key).transform = t; // throws on unknown feature
        }
    }
    return spec;
}

void FeatureSpec::save(std::ostream& out) const {
    out << "target = " << transform_name(target_transform) << '\n';
    for (const auto& [name, r] : features)
        out << name << " = " << transform_name(r.transform) << '\n';
}

int DesignMatrix::column_index(const std::string& name) const {
    const auto it = std::find(column_names.begin(), column_names.end(), name);
    return it == column_names.end() ? -1 : int(it - column_names.begin());
}

namespace {

std::vector<double> apply_transform(const DailyPanel& panel, const std::string& source,
                                    Transform t) {
    const auto& series = panel.column(source);
    try {
        switch (t) {
            case Transform::Level:
                return series;
            case Transform::Diff22:
                return change_22(series, ChangeKind::Diff);
            case Transform::LogDiff22:
                return change_22(series, ChangeKind::LogDiff);
            case Transform::RollingMean22:
                return rolling_mean(series);
            case Transform::MeanDiff22:
                return change_22(rolling_mean(series), ChangeKind::Diff);
            case Transform::MeanLogDiff22:
                return change_22(rolling_mean(series), ChangeKind::LogDiff);
            default:
                throw ConfigError("transform for '" + source + "' needs a panel variable source");
        }
    } catch (const NumericError& e) {
        throw NumericError("variable '" + source + "': " + e.what());
    }
}

} // namespace

DesignMatrix build_design(const DailyPanel& panel, const FeatureSpec& spec,
                          const std::string& target, int min_rows) {
    if (target != "base" && target != "peak")
        throw ConfigError("target must be 'base' or 'peak', got '" + target + "'");
    if (spec.features.size() != predictor_names().size())
        throw ConfigError("feature spec must define exactly 12 predictors");
    for (std::size_t c = 0; c < spec.features.size(); ++c) {
        if (spec.features[c].first != predictor_names()[c])
            throw ConfigError("predictor column " + std::to_string(c) + " must be '" +
                              predictor_names()[c] + "'");
    }

    const std::size_t n = panel.rows();
    const ChangeKind target_kind =
        spec.target_transform == Transform::Diff22 ? ChangeKind::Diff : ChangeKind::LogDiff;

    std::vector<double> y_full;
    try {
        y_full = change_22(panel.column(target), target_kind);
    } catch (const NumericError& e) {
        throw NumericError("target '" + target + "': " + e.what());
    }

    std::vector<std::vector<double>> cols;
    cols.reserve(spec.features.size());
    for (const auto& [name, r] : spec.features) {
        switch (r.transform) {
            case Transform::DayOfWeek: {
                std::vector<double> col(n);
                for (std::size_t t = 0; t < n; ++t) col[t] = double(day_of_week(panel.dates[t]));
                cols.push_back(std::move(col));
                break;
            }
            case Transform::Reversal: {
                std::vector<double> col(n, kNaN);
                for (std::size_t t = 22; t < n; ++t) col[t] = y_full[t - 22];
                cols.push_back(std::move(col));
                break;
            }
            default:
                cols.push_back(apply_transform(panel, r.source, r.transform));
        }
    }

    // Warm-up: first row where target and every column are available.
    std::size_t first = 0;
    const auto first_finite = [](const std::vector<double>& v) {
        std::size_t t = 0;
        while (t < v.size() && std::isnan(v[t])) ++t;
        return t;
    };
    first = first_finite(y_full);
    for (const auto& col : cols) first = std::max(first, first_finite(col));
    if (first >= n || n - first < std::size_t(std::max(min_rows, 1)))
        throw DataError("insufficient data: " + std::to_string(n > first ? n - first : 0) +
                        " rows after warm-up, need at least " + std::to_string(min_rows));

    const std::size_t rows = n - first;
    DesignMatrix design;
    design.target = target;
    design.column_names.assign(predictor_names().begin(), predictor_names().end());
    design.dates.assign(panel.dates.begin() + long(first), panel.dates.end());
    design.X.resize(Eigen::Index(rows), Eigen::Index(cols.size()));
    design.y.resize(Eigen::Index(rows));
    for (std::size_t t = 0; t < rows; ++t) {
        design.y[Eigen::Index(t)] = y_full[first + t];
        for (std::size_t c = 0; c < cols.size(); ++c)
            design.X(Eigen::Index(t), Eigen::Index(c)) = cols[c][first + t];
    }
    if (!design.X.allFinite() || !design.y.allFinite())
        throw DataError("design matrix contains non-finite entries; fill gaps first");
    return design;
}

void write_design_csv(const DesignMatrix& design, std::ostream& out,
                      const std::vector<std::string>& header_lines) {
    for (const auto& h : header_lines) out << "# " << h << '\n';
    out << "date,y";
    for (const auto& name : design.column_names) out << ',' << name;
    out << '\n';
    char buf[64];
    const auto emit = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.12g", v);
        out << buf;
    };
    for (Eigen::Index t = 0; t < design.rows(); ++t) {
        out << format_date(design.dates[std::size_t(t)]) << ',';
        emit(design.y[t]);
        for (Eigen::Index c = 0; c < design.cols(); ++c) {
            out << ',';
            emit(design.X(t, c));
        }
        out << '\n';
    }
}

} // namespace epf
