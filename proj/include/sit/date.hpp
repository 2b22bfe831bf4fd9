#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace sit {

using Date = std::chrono::year_month_day;

/// Parses a YYYY-MM-DD date. Throws ValidationError on malformed or impossible dates.
Date parse_iso_date(std::string_view text);

std::string format_date(Date d);

/// Identifier of the ISO week containing `d`: the day number of that week's Monday.
std::int64_t iso_week_key(Date d);

/// True for Monday..Friday.
bool is_weekday(Date d);

Date next_business_day(Date d);

}  // namespace sit
