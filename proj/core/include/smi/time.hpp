#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace smi {

// All instants are UTC with second precision; calendar days are UTC days.
using Instant = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

Date to_date(Instant t);

// Monday (UTC) of the ISO week containing d. Week identity in the whole
// pipeline is this Monday date.
Date week_start(Date d);
inline Date week_start(Instant t) { return week_start(to_date(t)); }

// Same calendar day `years` earlier; Feb 29 maps to Feb 28.
Date shift_years(Date d, int years);

int year_of(Date d);

// "YYYY-MM-DD".
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date d);

// Accepts ISO-8601 ("2020-03-16T12:00:00Z", optional fractional seconds,
// "+hh:mm" offsets, or a space instead of 'T'), the Twitter v1.1
// created_at layout ("Mon Mar 16 12:00:00 +0000 2020"), and integral
// epoch seconds. The result is normalized to UTC.
std::optional<Instant> parse_timestamp(std::string_view text);
std::string format_instant(Instant t);

// Date columns in JHU-style case files ("3/16/20") as well as ISO dates.
std::optional<Date> parse_flexible_date(std::string_view text);

}  // namespace smi
