#include "sit/date.hpp"

#include <charconv>

#include <fmt/format.h>

#include "sit/errors.hpp"

namespace sit {

namespace {

int parse_field(std::string_view text, std::string_view whole) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ValidationError("invalid date '" + std::string(whole) + "'");
    }
    return value;
}

}  // namespace

Date parse_iso_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw ValidationError("invalid date '" + std::string(text) + "', expected YYYY-MM-DD");
    }
    const int y = parse_field(text.substr(0, 4), text);
    const int m = parse_field(text.substr(5, 2), text);
    const int d = parse_field(text.substr(8, 2), text);
    Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
              std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok()) {
        throw ValidationError("invalid date '" + std::string(text) + "'");
    }
    return date;
}

std::string format_date(Date d) {
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(d.year()),
                       static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
}

std::int64_t iso_week_key(Date d) {
    const std::chrono::sys_days days{d};
    const std::chrono::weekday wd{days};
    const auto monday = days - std::chrono::days{wd.iso_encoding() - 1};
    return monday.time_since_epoch().count();
}

bool is_weekday(Date d) {
    const std::chrono::weekday wd{std::chrono::sys_days{d}};
    return wd.iso_encoding() <= 5;
}

Date next_business_day(Date d) {
    std::chrono::sys_days days{d};
    do {
        days += std::chrono::days{1};
    } while (!is_weekday(Date{days}));
    return Date{days};
}

}  // namespace sit
