#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace spreadq {

using Date = std::chrono::year_month_day;

// Parses a strict ISO-8601 calendar date (YYYY-MM-DD).
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date d);

Date make_date(int year, unsigned month, unsigned day);
Date first_of_month(Date d);
Date last_of_month(Date d);
Date add_months(Date d, int months);
// Calendar month counter: year*12 + (month-1).
int month_index(Date d);
Date date_from_month_index(int index);

// Inclusive calendar range.
struct DateRange {
    Date first;
    Date last;

    bool contains(Date d) const { return first <= d && d <= last; }
    bool operator==(const DateRange&) const = default;
};

std::string format_range(const DateRange& r);

}  // namespace spreadq
