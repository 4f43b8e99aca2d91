#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace infodensity {

using Date = std::chrono::year_month_day;

/// Parses an ISO-8601 calendar date (YYYY-MM-DD).
std::optional<Date> parse_iso_date(std::string_view text);

std::string format_iso_date(const Date& d);

/// Year plus elapsed fraction of that year, e.g. 2024-07-02 -> 2024.5 (leap year).
double fractional_year(const Date& d);

} // namespace infodensity
