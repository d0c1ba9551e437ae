#include "latentflow/time.hpp"

#include <charconv>
#include <cstdio>

namespace latentflow {

namespace {

bool parse_fixed(std::string_view text, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > text.size()) {
        return false;
    }
    int value = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        const char c = text[i];
        if (c < '0' || c > '9') {
            return false;
        }
        value = value * 10 + (c - '0');
    }
    out = value;
    return true;
}

std::optional<std::chrono::year_month_day> parse_ymd(std::string_view text) {
    int y = 0, m = 0, d = 0;
    if (text.size() < 10 || text[4] != '-' || text[7] != '-' ||
        !parse_fixed(text, 0, 4, y) || !parse_fixed(text, 5, 2, m) ||
        !parse_fixed(text, 8, 2, d)) {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y},
                                          std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    return ymd;
}

}  // namespace

std::optional<Timestamp> parse_rfc3339(std::string_view text) {
    // YYYY-MM-DDTHH:MM:SS then Z or +HH:MM / -HH:MM
    if (text.size() < 20) {
        return std::nullopt;
    }
    const auto ymd = parse_ymd(text.substr(0, 10));
    if (!ymd || (text[10] != 'T' && text[10] != 't')) {
        return std::nullopt;
    }
    int hh = 0, mm = 0, ss = 0;
    if (text[13] != ':' || text[16] != ':' || !parse_fixed(text, 11, 2, hh) ||
        !parse_fixed(text, 14, 2, mm) || !parse_fixed(text, 17, 2, ss)) {
        return std::nullopt;
    }
    if (hh > 23 || mm > 59 || ss > 59) {
        return std::nullopt;
    }
    const std::string_view zone = text.substr(19);
    int offset_minutes = 0;
    if (zone == "Z" || zone == "z") {
        offset_minutes = 0;
    } else if (zone.size() == 6 && (zone[0] == '+' || zone[0] == '-') && zone[3] == ':') {
        int oh = 0, om = 0;
        if (!parse_fixed(zone, 1, 2, oh) || !parse_fixed(zone, 4, 2, om) || oh > 23 || om > 59) {
            return std::nullopt;
        }
        offset_minutes = (oh * 60 + om) * (zone[0] == '-' ? -1 : 1);
    } else {
        return std::nullopt;
    }
    const auto local = std::chrono::sys_days{*ymd} + std::chrono::hours{hh} +
                       std::chrono::minutes{mm} + std::chrono::seconds{ss};
    return Timestamp{local - std::chrono::minutes{offset_minutes}};
}

std::string format_rfc3339(Timestamp ts) {
    const auto day = std::chrono::floor<std::chrono::days>(ts);
    const std::chrono::year_month_day ymd{day};
    const std::chrono::hh_mm_ss hms{ts - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

std::optional<Date> parse_iso_date(std::string_view text) {
    if (text.size() != 10) {
        return std::nullopt;
    }
    const auto ymd = parse_ymd(text);
    if (!ymd) {
        return std::nullopt;
    }
    return Date{*ymd};
}

std::string format_iso_date(Date date) {
    const std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Date local_date(Timestamp ts, std::chrono::minutes utc_offset) {
    return std::chrono::floor<std::chrono::days>(ts + utc_offset);
}

long seconds_into_local_day(Timestamp ts, std::chrono::minutes utc_offset) {
    const auto shifted = ts + utc_offset;
    const auto day = std::chrono::floor<std::chrono::days>(shifted);
    return static_cast<long>((shifted - day).count());
}

}  // namespace latentflow
