#pragma once

#include <compare>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latentflow/data_model.hpp"
#include "latentflow/time.hpp"

namespace latentflow {

inline constexpr std::string_view kNowhere = "nowhere";
inline constexpr std::string_view kBedToken = "bed";
inline constexpr int kDefaultWindowMinutes = 20;
inline constexpr int kDefaultSlotsPerDay = 72;

struct WindowConfig {
    int window_minutes = kDefaultWindowMinutes;
    int utc_offset_minutes = 0;

    /// Throws ContractViolation unless window_minutes divides 1440.
    void validate() const;
    int slots_per_day() const { return 1440 / window_minutes; }
};

/// Identifies one participant-day.
struct DayKey {
    std::string participant_id;
    Date date;

    auto operator<=>(const DayKey&) const = default;
    bool operator==(const DayKey&) const = default;
};

/// A participant-day as one location token per window slot.
/// Slot s covers [s * window, (s + 1) * window) of the local day.
struct DayString {
    std::string participant_id;
    Date date;
    std::vector<std::string> tokens;

    DayKey key() const { return {participant_id, date}; }
    bool operator==(const DayString&) const = default;
};

/// Builds the day string for one participant-day.
///
/// Each slot takes the most frequent token among its events; bed_enter counts
/// as "bed", bed_leave is ignored, empty slots are "nowhere". Ties go to the
/// token whose first event in the slot is earliest. `events` must be sorted by
/// timestamp and all belong to `participant_id` on local date `date`.
DayString window_day(std::string participant_id, Date date, std::span<const EventRecord> events,
                     const WindowConfig& config = {});

/// Day strings for every participant-day with at least one event, ordered by
/// (participant, date). No missing days are imputed.
std::vector<DayString> window_cohort(const Cohort& cohort, const WindowConfig& config = {});

/// Tokens joined by single spaces.
std::string day_to_text(const DayString& day);

/// Inverse of day_to_text. Throws DataError when the token count differs
/// from `expected_slots`.
DayString text_to_day(std::string participant_id, Date date, std::string_view text,
                      int expected_slots = kDefaultSlotsPerDay);

/// CSV: participant_id,date,"tok tok ...".
void write_day_strings(std::ostream& out, std::span<const DayString> days);
std::vector<DayString> read_day_strings(std::istream& in, int expected_slots = kDefaultSlotsPerDay);
std::vector<DayString> read_day_strings_file(const std::filesystem::path& path,
                                             int expected_slots = kDefaultSlotsPerDay);

}  // namespace latentflow
