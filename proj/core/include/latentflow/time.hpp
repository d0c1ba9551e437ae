#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace latentflow {

using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

/// Parses an RFC 3339 instant ("2023-08-01T09:00:00Z", "...+01:00") into UTC.
/// Fractional seconds are rejected; events carry 1-second resolution.
std::optional<Timestamp> parse_rfc3339(std::string_view text);

/// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_rfc3339(Timestamp ts);

/// Parses "YYYY-MM-DD".
std::optional<Date> parse_iso_date(std::string_view text);
std::string format_iso_date(Date date);

/// Calendar date of `ts` seen from a fixed offset east of UTC.
Date local_date(Timestamp ts, std::chrono::minutes utc_offset);

/// Seconds elapsed since local midnight, in [0, 86400).
long seconds_into_local_day(Timestamp ts, std::chrono::minutes utc_offset);

/// Signed number of calendar days from `from` to `to`.
inline long days_between(Date from, Date to) {
    return static_cast<long>((to - from).count());
}

}  // namespace latentflow
