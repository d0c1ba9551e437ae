#include "latentflow/preprocess.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "latentflow/csv.hpp"
#include "latentflow/error.hpp"

namespace latentflow {

void WindowConfig::validate() const {
    if (window_minutes <= 0 || 1440 % window_minutes != 0) {
        throw ContractViolation("window_minutes must divide 1440, got " +
                                std::to_string(window_minutes));
    }
    if (utc_offset_minutes <= -1440 || utc_offset_minutes >= 1440) {
        throw ContractViolation("utc_offset_minutes out of range");
    }
}

namespace {

struct SlotTally {
    std::string_view token;
    int count = 0;
    std::size_t first_seen = 0;
};

}  // namespace

DayString window_day(std::string participant_id, Date date, std::span<const EventRecord> events,
                     const WindowConfig& config) {
    config.validate();
    const std::chrono::minutes offset{config.utc_offset_minutes};
    const int slots = config.slots_per_day();
    const long window_seconds = static_cast<long>(config.window_minutes) * 60;

    std::vector<std::vector<SlotTally>> tallies(static_cast<std::size_t>(slots));
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (e.participant_id != participant_id) {
            throw ContractViolation("window_day: event for '" + e.participant_id +
                                    "' in day of '" + participant_id + "'");
        }
        if (local_date(e.timestamp, offset) != date) {
            throw ContractViolation("window_day: event at " + format_rfc3339(e.timestamp) +
                                    " is not on " + format_iso_date(date));
        }
        if (i > 0 && e.timestamp < events[i - 1].timestamp) {
            throw ContractViolation("window_day: events are not sorted by timestamp");
        }
        std::string_view token;
        if (e.kind == EventKind::location_entry) {
            token = e.location;
        } else if (e.kind == EventKind::bed_enter) {
            token = kBedToken;
        } else {
            continue;
        }
        const auto slot = static_cast<std::size_t>(seconds_into_local_day(e.timestamp, offset) /
                                                   window_seconds);
        auto& tally = tallies[slot];
        auto it = std::find_if(tally.begin(), tally.end(),
                               [&](const SlotTally& t) { return t.token == token; });
        if (it == tally.end()) {
            tally.push_back({token, 1, i});
        } else {
            ++it->count;
        }
    }

    DayString day{std::move(participant_id), date, {}};
    day.tokens.reserve(tallies.size());
    for (const auto& tally : tallies) {
        // Entries are appended in first-seen order, so the first maximum wins ties.
        const SlotTally* best = nullptr;
        for (const auto& t : tally) {
            if (best == nullptr || t.count > best->count) {
                best = &t;
            }
        }
        day.tokens.emplace_back(best ? best->token : kNowhere);
    }
    return day;
}

std::vector<DayString> window_cohort(const Cohort& cohort, const WindowConfig& config) {
    config.validate();
    const std::chrono::minutes offset{config.utc_offset_minutes};
    std::vector<DayString> days;
    for (const auto& [id, events] : cohort.events) {
        std::vector<EventRecord> sorted = events;
        std::sort(sorted.begin(), sorted.end(), canonical_less);
        std::size_t begin = 0;
        while (begin < sorted.size()) {
            const Date date = local_date(sorted[begin].timestamp, offset);
            std::size_t end = begin;
            while (end < sorted.size() && local_date(sorted[end].timestamp, offset) == date) {
                ++end;
            }
            days.push_back(window_day(id, date,
                                      std::span<const EventRecord>(sorted).subspan(begin, end - begin),
                                      config));
            begin = end;
        }
    }
    return days;
}

std::string day_to_text(const DayString& day) {
    std::string text;
    for (std::size_t i = 0; i < day.tokens.size(); ++i) {
        if (i > 0) text.push_back(' ');
        text += day.tokens[i];
    }
    return text;
}

DayString text_to_day(std::string participant_id, Date date, std::string_view text,
                      int expected_slots) {
    DayString day{std::move(participant_id), date, {}};
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto next = text.find(' ', pos);
        const auto token = text.substr(pos, next == std::string_view::npos ? next : next - pos);
        if (token.empty()) {
            throw DataError("day string has an empty token");
        }
        day.tokens.emplace_back(token);
        if (next == std::string_view::npos) break;
        pos = next + 1;
        if (pos == text.size()) {
            throw DataError("day string has a trailing space");
        }
    }
    if (static_cast<int>(day.tokens.size()) != expected_slots) {
        throw DataError("day string for " + day.participant_id + " " + format_iso_date(date) +
                        " has " + std::to_string(day.tokens.size()) + " tokens, expected " +
                        std::to_string(expected_slots));
    }
    return day;
}

void write_day_strings(std::ostream& out, std::span<const DayString> days) {
    out << "participant_id,date,tokens\n";
    for (const auto& d : days) {
        out << csv::escape(d.participant_id) << ',' << format_iso_date(d.date) << ','
            << csv::quote(day_to_text(d)) << '\n';
    }
}

std::vector<DayString> read_day_strings(std::istream& in, int expected_slots) {
    std::vector<DayString> days;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        return days;
    }
    ++line_no;
    if (csv::trim(line) != "participant_id,date,tokens") {
        throw DataError("day-string file must start with header participant_id,date,tokens");
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        const auto where = "day strings line " + std::to_string(line_no) + ": ";
        try {
            const auto cells = csv::split(line);
            if (cells.size() != 3) {
                throw DataError("expected 3 columns");
            }
            const auto date = parse_iso_date(cells[1]);
            if (!date) {
                throw DataError("bad date '" + cells[1] + "'");
            }
            days.push_back(text_to_day(cells[0], *date, cells[2], expected_slots));
        } catch (const DataError& e) {
            throw DataError(where + e.what());
        }
    }
    return days;
}

std::vector<DayString> read_day_strings_file(const std::filesystem::path& path, int expected_slots) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open day-string file " + path.string());
    }
    return read_day_strings(in, expected_slots);
}

}  // namespace latentflow
