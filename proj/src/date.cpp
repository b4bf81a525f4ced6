#include "spreadq/date.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

namespace spreadq {

namespace {

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{};
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
        !parse_int(text.substr(8, 2), d)) {
        return std::nullopt;
    }
    Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
              std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok()) return std::nullopt;
    return date;
}

std::string format_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

Date make_date(int year, unsigned month, unsigned day) {
    return Date{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
}

Date first_of_month(Date d) {
    return Date{d.year(), d.month(), std::chrono::day{1}};
}

Date last_of_month(Date d) {
    std::chrono::year_month_day_last last{d.year(), std::chrono::month_day_last{d.month()}};
    return Date{last};
}

int month_index(Date d) {
    return static_cast<int>(d.year()) * 12 + static_cast<int>(static_cast<unsigned>(d.month())) - 1;
}

Date date_from_month_index(int index) {
    int year = index / 12;
    unsigned month = static_cast<unsigned>(index % 12) + 1;
    return make_date(year, month, 1);
}

Date add_months(Date d, int months) {
    Date first = date_from_month_index(month_index(d) + months);
    Date last = last_of_month(first);
    unsigned day = std::min(static_cast<unsigned>(d.day()), static_cast<unsigned>(last.day()));
    return Date{first.year(), first.month(), std::chrono::day{day}};
}

std::string format_range(const DateRange& r) {
    return format_date(r.first) + ".." + format_date(r.last);
}

}  // namespace spreadq
