#pragma once

#include "epforest/calendar.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace epf {

/// One working-day observation: date plus a value per variable.
struct DailyRecord {
    Date date;
    std::map<std::string, double> values;
};

/// Calendar-aligned table of daily observations, one column per variable.
/// Missing values are NaN. Dates are strictly increasing working days.
struct DailyPanel {
    std::vector<Date> dates;
    std::vector<std::string> variables;
    std::vector<std::vector<double>> columns; // columns[v][t]

    std::size_t rows() const { return dates.size(); }

    int variable_index(const std::string& name) const;
    bool has(const std::string& name) const { return variable_index(name) >= 0; }

    const std::vector<double>& column(const std::string& name) const;
    std::vector<double>& column(const std::string& name);

    /// Row view; skips missing values.
    DailyRecord record(std::size_t row) const;
};

/// The 13 source variables every full dataset carries.
const std::vector<std::string>& standard_schema();

/// Reads a daily CSV (`date,<var>,...`, ISO dates, empty cell = missing),
/// keeps only working days, and returns the panel sorted by date. Lines
/// starting with '#' are skipped. Columns not in `schema` raise DataError,
/// as do duplicate or malformed dates.
DailyPanel ingest_csv(const std::filesystem::path& path, const std::vector<std::string>& schema);

enum class FillPolicy {
    ForwardFill, // carry the last observation forward
    Linear,      // straight line between observed anchors
};

/// Fills interior gaps per `policy`; the cpi column is always interpolated
/// linearly between its anchors regardless of policy. Rows before the first
/// date at which every variable is observed are trimmed; values past the
/// last anchor are carried forward. A variable with no observations at all
/// raises DataError naming it.
DailyPanel fill_gaps(DailyPanel panel, FillPolicy policy);

/// Divides each of `dollar_variables` by the same-day eurusd rate.
/// A non-positive rate raises DataError naming the date.
DailyPanel convert_to_eur(DailyPanel panel,
                          const std::vector<std::string>& dollar_variables = {"oil", "coal",
                                                                              "natgas"});

/// Keeps rows with from <= date <= to.
DailyPanel filter_dates(DailyPanel panel, Date from, Date to);

/// Writes the panel in the exact format ingest_csv reads (missing -> empty
/// cell). `header_lines` are emitted first, each prefixed with "# ".
void write_panel_csv(const DailyPanel& panel, std::ostream& out,
                     const std::vector<std::string>& header_lines = {});

} // namespace epf
