#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace basketlab {

// Calendar day held as a serial count of days since 1970-01-01.
// Serial form makes gap filling and range arithmetic trivial.
struct Day {
    std::int32_t serial = 0;

    friend auto operator<=>(const Day&, const Day&) = default;
};

Day make_day(int year, int month, int day);

// Strict ISO-8601 (YYYY-MM-DD). Throws a data error on anything else.
Day parse_iso_date(std::string_view text);

std::string format_iso_date(Day d);

// 0 = Monday .. 6 = Sunday.
int day_of_week(Day d);

inline Day operator+(Day d, std::int32_t days) { return Day{d.serial + days}; }
inline std::int32_t operator-(Day a, Day b) { return a.serial - b.serial; }

} // namespace basketlab
