#include "basketlab/date.hpp"

#include <array>
#include <cstdio>

#include "basketlab/error.hpp"

namespace basketlab {

namespace {

bool is_leap(int y) {
    return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
}

int days_in_month(int y, int m) {
    static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                    31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lengths[static_cast<std::size_t>(m - 1)];
}

// Proleptic Gregorian day count (Howard Hinnant's civil-days algorithm).
std::int32_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy =
        static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int32_t>(doe) - 719468;
}

void civil_from_days(std::int32_t z, int& y, int& m, int& d) {
    z += 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int yy = static_cast<int>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = yy + (m <= 2);
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

} // namespace

Day make_day(int year, int month, int day) {
    return Day{days_from_civil(year, month, day)};
}

Day parse_iso_date(std::string_view text) {
    const auto fail = [&] {
        return Error::data("malformed date '" + std::string(text) +
                           "' (expected YYYY-MM-DD)");
    };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw fail();
    const std::string_view ys = text.substr(0, 4);
    const std::string_view ms = text.substr(5, 2);
    const std::string_view ds = text.substr(8, 2);
    if (!all_digits(ys) || !all_digits(ms) || !all_digits(ds)) throw fail();
    const int y = (ys[0] - '0') * 1000 + (ys[1] - '0') * 100 + (ys[2] - '0') * 10 + (ys[3] - '0');
    const int m = (ms[0] - '0') * 10 + (ms[1] - '0');
    const int d = (ds[0] - '0') * 10 + (ds[1] - '0');
    if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) throw fail();
    return make_day(y, m, d);
}

std::string format_iso_date(Day day) {
    int y = 0, m = 0, d = 0;
    civil_from_days(day.serial, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
    return buf;
}

int day_of_week(Day d) {
    // 1970-01-01 was a Thursday; with Monday = 0 that is offset 3.
    return static_cast<int>(((d.serial % 7) + 7 + 3) % 7);
}

} // namespace basketlab
