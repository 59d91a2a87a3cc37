#ifndef RAINBC_DATE_HPP
#define RAINBC_DATE_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace rainbc {

/// Calendar date in the proleptic Gregorian calendar.
struct Date {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31

    auto operator<=>(const Date&) const = default;

    /// Days since 1970-01-01 (negative before).
    std::int64_t to_days() const;
    static Date from_days(std::int64_t days);

    Date plus_days(std::int64_t n) const { return from_days(to_days() + n); }
};

bool is_leap_year(int year);
int days_in_month(int year, int month);

std::string to_iso(const Date& d);

/// Parses strict ISO-8601 YYYY-MM-DD; rejects impossible dates.
std::optional<Date> parse_iso_date(std::string_view text);

}  // namespace rainbc

#endif
