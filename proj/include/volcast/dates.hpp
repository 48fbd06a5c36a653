#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace volcast {

/// Calendar day. Only observed dates are ever stored; there is no
/// holiday or weekend logic anywhere in the library.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;

    /// Days since 1970-01-01 (proleptic Gregorian). Used for gap
    /// measurement when inferring a series' native frequency.
    std::int64_t serial() const;

    std::string to_string() const;  // ISO-8601 YYYY-MM-DD
};

/// Parse strict ISO-8601 `YYYY-MM-DD`. Throws std::invalid_argument on
/// malformed input or an impossible calendar day (e.g. month 13).
Date parse_date(const std::string& text);

bool is_valid_date(int year, int month, int day);

}  // namespace volcast
