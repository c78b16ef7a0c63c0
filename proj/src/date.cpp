#include "fieldwork/date.hpp"

#include <charconv>
#include <chrono>

namespace fieldwork {

namespace {

std::chrono::year_month_day to_ymd(int serial) {
    std::chrono::sys_days sd{std::chrono::days{serial}};
    return std::chrono::year_month_day{sd};
}

}  // namespace

Date Date::from_ymd(int year, int month, int day) {
    std::chrono::year_month_day ymd{std::chrono::year{year},
                                    std::chrono::month{static_cast<unsigned>(month)},
                                    std::chrono::day{static_cast<unsigned>(day)}};
    std::chrono::sys_days sd{ymd};
    return Date(static_cast<int>(sd.time_since_epoch().count()));
}

std::optional<Date> Date::parse(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    auto num = [](std::string_view s, int& out) {
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc() && p == s.data() + s.size();
    };
    if (!num(iso.substr(0, 4), y) || !num(iso.substr(5, 2), m) || !num(iso.substr(8, 2), d))
        return std::nullopt;
    std::chrono::year_month_day ymd{std::chrono::year{y},
                                    std::chrono::month{static_cast<unsigned>(m)},
                                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date::from_ymd(y, m, d);
}

std::string Date::to_string() const {
    auto ymd = to_ymd(serial_);
    char buf[11];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

int Date::year() const { return static_cast<int>(to_ymd(serial_).year()); }
int Date::month() const { return static_cast<int>(static_cast<unsigned>(to_ymd(serial_).month())); }
int Date::day() const { return static_cast<int>(static_cast<unsigned>(to_ymd(serial_).day())); }

int Date::weekday() const {
    // 1970-01-01 was a Thursday; map to Monday=0.
    int w = (serial_ + 3) % 7;
    return w < 0 ? w + 7 : w;
}

}  // namespace fieldwork
