#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

namespace epf {

/// Calendar date, resolution one day.
using Date = std::chrono::sys_days;

/// Parses an ISO-8601 date (YYYY-MM-DD). Throws DataError on anything else,
/// including non-existent dates such as 2021-02-30.
Date parse_date(std::string_view text);

/// Formats as YYYY-MM-DD.
std::string format_date(Date date);

/// ISO weekday, 1 = Monday .. 7 = Sunday.
int day_of_week(Date date);

/// Monday through Friday. No holiday table: holidays count as working days.
bool is_working_day(Date date);

/// The first `count` working days starting at `start` (inclusive if `start`
/// itself is a working day).
std::vector<Date> working_days_from(Date start, std::size_t count);

} // namespace epf
