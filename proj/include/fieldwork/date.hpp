#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace fieldwork {

// Calendar date stored as days since 1970-01-01. Cheap to copy and compare;
// all fieldwork bookkeeping is day-resolution.
class Date {
public:
    Date() = default;
    explicit Date(int serial) : serial_(serial) {}

    static Date from_ymd(int year, int month, int day);
    // Strict ISO-8601 (YYYY-MM-DD). Returns nullopt on malformed input.
    static std::optional<Date> parse(std::string_view iso);

    int serial() const { return serial_; }
    std::string to_string() const;

    int year() const;
    int month() const;   // 1..12
    int day() const;     // 1..31
    int weekday() const; // 0=Monday .. 6=Sunday

    Date operator+(int days) const { return Date(serial_ + days); }
    Date operator-(int days) const { return Date(serial_ - days); }
    int operator-(Date other) const { return serial_ - other.serial_; }
    Date& operator++() { ++serial_; return *this; }

    auto operator<=>(const Date&) const = default;

private:
    int serial_ = 0;
};

}  // namespace fieldwork
