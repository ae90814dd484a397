#include "epforest/panel.hpp"

#include "epforest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace epf {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

bool missing(double v) {
    return std::isnan(v);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

} // namespace

int DailyPanel::variable_index(const std::string& name) const {
    const auto it = std::find(variables.begin(), variables.end(), name);
    return it == variables.end() ? -1 : int(it - variables.begin());
}

const std::vector<double>& DailyPanel::column(const std::string& name) const {
    const int idx = variable_index(name);
    if (idx < 0) throw DataError("panel has no variable '" + name + "'");
    return columns[std::size_t(idx)];
}

std::vector<double>& DailyPanel::column(const std::string& name) {
    const int idx = variable_index(name);
    if (idx < 0) throw DataError("panel has no variable '" + name + "'");
    return columns[std::size_t(idx)];
}

DailyRecord DailyPanel::record(std::size_t row) const {
    DailyRecord rec{dates.at(row), {}};
    for (std::size_t v = 0; v < variables.size(); ++v) {
        if (!missing(columns[v][row])) rec.values[variables[v]] = columns[v][row];
    }
    return rec;
}

const std::vector<std::string>& standard_schema() {
    static const std::vector<std::string> names = {"base", "peak",   "permit", "oil", "coal",
                                                   "natgas", "qwind", "temp",   "sun", "eurusd",
                                                   "i",      "vix",   "cpi"};
    return names;
}

DailyPanel ingest_csv(const std::filesystem::path& path, const std::vector<std::string>& schema) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");

    std::string line;
    std::size_t line_no = 0;

    // Header: a date column followed by variable columns.
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        header = split_line(line);
        break;
    }
    if (header.empty()) throw DataError("'" + path.string() + "' has no header row");
    if (header.front() != "date")
        throw DataError("'" + path.string() + "': first column must be 'date', got '" +
                        header.front() + "'");
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (std::find(schema.begin(), schema.end(), header[c]) == schema.end())
            throw DataError("unknown column '" + header[c] + "' not in schema");
    }

    DailyPanel panel;
    panel.variables.assign(header.begin() + 1, header.end());
    panel.columns.resize(panel.variables.size());

    struct Row {
        Date date;
        std::vector<double> values;
    };
    std::vector<Row> rows;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split_line(line);
        if (cells.size() != header.size())
            throw DataError("row " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " cells, got " +
                            std::to_string(cells.size()));
        Row row;
        try {
            row.date = parse_date(cells[0]);
        } catch (const DataError& e) {
            throw DataError("row " + std::to_string(line_no) + ": " + e.what());
        }
        if (!is_working_day(row.date)) continue;
        row.values.reserve(cells.size() - 1);
        for (std::size_t c = 1; c < cells.size(); ++c) {
            if (cells[c].empty()) {
                row.values.push_back(kMissing);
                continue;
            }
            try {
                std::size_t used = 0;
                const double v = std::stod(cells[c], &used);
                if (used != cells[c].size()) throw std::invalid_argument(cells[c]);
                row.values.push_back(v);
            } catch (const std::exception&) {
                throw DataError("row " + std::to_string(line_no) + ": cannot parse value '" +
                                cells[c] + "' in column '" + header[c] + "'");
            }
        }
        rows.push_back(std::move(row));
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.date < b.date; });
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].date == rows[r - 1].date)
            throw DataError("duplicate date " + format_date(rows[r].date));
    }

    panel.dates.reserve(rows.size());
    for (auto& col : panel.columns) col.reserve(rows.size());
    for (const auto& row : rows) {
        panel.dates.push_back(row.date);
        for (std::size_t v = 0; v < panel.columns.size(); ++v)
            panel.columns[v].push_back(row.values[v]);
    }
    return panel;
}

namespace {

void fill_forward(std::vector<double>& col) {
    double last = kMissing;
    for (double& v : col) {
        if (missing(v))
            v = last;
        else
            last = v;
    }
}

void fill_linear(std::vector<double>& col) {
    const std::size_t n = col.size();
    std::size_t prev = n;
    for (std::size_t t = 0; t < n; ++t) {
        if (missing(col[t])) continue;
        if (prev != n && t > prev + 1) {
            const double lo = col[prev], hi = col[t];
            for (std::size_t s = prev + 1; s < t; ++s) {
                const double w = double(s - prev) / double(t - prev);
                col[s] = lo + w * (hi - lo);
            }
        }
        prev = t;
    }
    // Past the last anchor: hold flat.
    if (prev != n)
        for (std::size_t s = prev + 1; s < n; ++s) col[s] = col[prev];
}

} // namespace

DailyPanel fill_gaps(DailyPanel panel, FillPolicy policy) {
    for (std::size_t v = 0; v < panel.variables.size(); ++v) {
        auto& col = panel.columns[v];
        if (std::none_of(col.begin(), col.end(), [](double x) { return !missing(x); }))
            throw DataError("variable '" + panel.variables[v] + "' has no observations");
        const bool linear = policy == FillPolicy::Linear || panel.variables[v] == "cpi";
        if (linear)
            fill_linear(col);
        else
            fill_forward(col);
    }

    // Leading missings cannot be filled; trim rows before every variable starts.
    std::size_t first = 0;
    for (const auto& col : panel.columns) {
        std::size_t v_first = 0;
        while (v_first < col.size() && missing(col[v_first])) ++v_first;
        first = std::max(first, v_first);
    }
    if (first > 0) {
        panel.dates.erase(panel.dates.begin(), panel.dates.begin() + long(first));
        for (auto& col : panel.columns) col.erase(col.begin(), col.begin() + long(first));
    }
    return panel;
}

DailyPanel convert_to_eur(DailyPanel panel, const std::vector<std::string>& dollar_variables) {
    const auto& fx = panel.column("eurusd");
    for (std::size_t t = 0; t < panel.rows(); ++t) {
        if (!missing(fx[t]) && fx[t] <= 0.0)
            throw DataError("non-positive eurusd rate on " + format_date(panel.dates[t]));
    }
    for (const auto& name : dollar_variables) {
        auto& col = panel.column(name);
        for (std::size_t t = 0; t < panel.rows(); ++t) {
            if (missing(col[t])) continue;
            if (missing(fx[t]))
                throw DataError("eurusd missing on " + format_date(panel.dates[t]) +
                                ", cannot convert '" + name + "'");
            col[t] /= fx[t];
        }
    }
    return panel;
}

DailyPanel filter_dates(DailyPanel panel, Date from, Date to) {
    if (from > to) throw ConfigError("date filter: from > to");
    const auto lo = std::lower_bound(panel.dates.begin(), panel.dates.end(), from);
    const auto hi = std::upper_bound(panel.dates.begin(), panel.dates.end(), to);
    const std::size_t b = std::size_t(lo - panel.dates.begin());
    const std::size_t e = std::size_t(hi - panel.dates.begin());
    DailyPanel out;
    out.variables = panel.variables;
    out.dates.assign(panel.dates.begin() + long(b), panel.dates.begin() + long(e));
    out.columns.reserve(panel.columns.size());
    for (const auto& col : panel.columns)
        out.columns.emplace_back(col.begin() + long(b), col.begin() + long(e));
    return out;
}

void write_panel_csv(const DailyPanel& panel, std::ostream& out,
                     const std::vector<std::string>& header_lines) {
    for (const auto& h : header_lines) out << "# " << h << '\n';
    out << "date";
    for (const auto& v : panel.variables) out << ',' << v;
    out << '\n';
    char buf[64];
    for (std::size_t t = 0; t < panel.rows(); ++t) {
        out << format_date(panel.dates[t]);
        for (const auto& col : panel.columns) {
            out << ',';
            if (!missing(col[t])) {
                std::snprintf(buf, sizeof buf, "%.12g", col[t]);
                out << buf;
            }
        }
        out << '\n';
    }
}

} // namespace epf
