#pragma once

#include <charconv>
#include <chrono>
#include <cstdio>
#include <string>
#include <string_view>

#include "depwatch/error.hpp"

namespace depwatch {

/// Calendar date (UTC, day resolution).
using Date = std::chrono::sys_days;

inline Date make_date(int y, unsigned m, unsigned d) {
    return Date{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}};
}

/// Parses `YYYY-MM-DD`. A trailing time part (`THH:MM:SSZ`) is accepted and truncated.
inline Date parse_date(std::string_view text) {
    auto fail = [&] { return ParseError("invalid ISO-8601 date '" + std::string(text) + "'", 1, 1); };
    if (text.size() < 10 || text[4] != '-' || text[7] != '-') throw fail();
    if (text.size() > 10 && text[10] != 'T') throw fail();
    int y = 0;
    unsigned m = 0, d = 0;
    auto num = [&](std::size_t pos, std::size_t len, auto& out) {
        auto [p, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
        if (ec != std::errc{} || p != text.data() + pos + len) throw fail();
    };
    num(0, 4, y);
    num(5, 2, m);
    num(8, 2, d);
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) throw fail();
    return Date{ymd};
}

inline std::string format_date(Date date) {
    const std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

inline bool is_monday(Date date) { return std::chrono::weekday{date} == std::chrono::Monday; }

/// The Monday on or before `date`.
inline Date week_start_of(Date date) {
    const unsigned offset = (std::chrono::weekday{date}.iso_encoding() + 6) % 7; // Monday -> 0
    return date - std::chrono::days{offset};
}

inline long long days_between(Date from, Date to) { return (to - from).count(); }

/// Inclusive date range.
struct DateRange {
    Date from;
    Date to;
};

} // namespace depwatch
