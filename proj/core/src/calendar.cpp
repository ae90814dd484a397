#include "epforest/calendar.hpp"

#include "epforest/errors.hpp"

#include <charconv>
#include <cstdio>

namespace epf {

Date parse_date(std::string_view text) {
    const auto fail = [&] {
        throw DataError("malformed date '" + std::string(text) + "', expected YYYY-MM-DD");
    };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') fail();

    const auto to_int = [&](std::string_view part) {
        int value = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
        if (ec != std::errc() || ptr != part.data() + part.size()) fail();
        return value;
    };
    const int y = to_int(text.substr(0, 4));
    const int m = to_int(text.substr(5, 2));
    const int d = to_int(text.substr(8, 2));

    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                          std::chrono::day{unsigned(d)}};
    if (!ymd.ok()) fail();
    return Date{ymd};
}

std::string format_date(Date date) {
    const std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                  unsigned(ymd.day()));
    return buf;
}

int day_of_week(Date date) {
    return int(std::chrono::weekday{date}.iso_encoding());
}

bool is_working_day(Date date) {
    return day_of_week(date) <= 5;
}

std::vector<Date> working_days_from(Date start, std::size_t count) {
    std::vector<Date> days;
    days.reserve(count);
    Date d = start;
    while (days.size() < count) {
        if (is_working_day(d)) days.push_back(d);
        d += std::chrono::days{1};
    }
    return days;
}

} // namespace epf
