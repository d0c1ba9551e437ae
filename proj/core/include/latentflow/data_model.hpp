#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latentflow/time.hpp"

namespace latentflow {

enum class EventKind { location_entry, bed_enter, bed_leave };

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

/// One sensor firing. `location` is non-empty iff kind == location_entry.
struct EventRecord {
    std::string participant_id;
    Timestamp timestamp;
    EventKind kind = EventKind::location_entry;
    std::string location;

    bool operator==(const EventRecord&) const = default;
};

/// Total order used wherever event order must not depend on input order.
bool canonical_less(const EventRecord& a, const EventRecord& b);

struct ParseIssue {
    std::size_t line = 0;  // 1-based
    std::string message;
};

struct ParsedEvents {
    std::vector<EventRecord> records;
    std::vector<ParseIssue> issues;

    bool ok() const { return issues.empty(); }
};

/// Reads JSONL events: {"participant", "ts", "kind", "location"?}.
/// Blank lines are skipped; every other unusable line becomes a ParseIssue.
ParsedEvents parse_events(std::istream& in);
ParsedEvents read_events_file(const std::filesystem::path& path);

std::string serialize_event(const EventRecord& event);
void write_events(std::ostream& out, std::span<const EventRecord> events);
void write_events_file(const std::filesystem::path& path, std::span<const EventRecord> events);

/// Clinical features. Empty CSV cells load as std::nullopt.
struct ParticipantProfile {
    std::string participant_id;
    std::optional<double> age;
    std::optional<bool> lives_alone;
    std::optional<double> mmse;
    std::optional<double> adas_cog;
    std::optional<double> hads_depression;
    std::optional<double> hads_anxiety;
    std::optional<double> mmse_prior;
    std::optional<double> adas_cog_prior;
    std::optional<Date> assessment_date;
    std::optional<Date> prior_assessment_date;

    bool operator==(const ParticipantProfile&) const = default;

    std::vector<std::string> missing_fields() const;
    bool is_complete() const { return missing_fields().empty(); }
};

inline constexpr std::string_view kProfilesHeader =
    "participant_id,age,lives_alone,mmse,adas_cog,hads_depression,hads_anxiety,mmse_prior,"
    "adas_cog_prior,assessment_date,prior_assessment_date";

/// Throws DataError naming the line on malformed or out-of-range rows.
std::map<std::string, ParticipantProfile> read_profiles(std::istream& in);
std::map<std::string, ParticipantProfile> read_profiles_file(const std::filesystem::path& path);
void write_profiles(std::ostream& out, const std::map<std::string, ParticipantProfile>& profiles);

/// Events grouped by participant, the profiles, and the covered date range.
struct Cohort {
    std::map<std::string, std::vector<EventRecord>> events;  // canonical order per participant
    std::map<std::string, ParticipantProfile> profiles;
    Date start_date{};
    Date end_date{};
    std::chrono::minutes utc_offset{0};

    /// Groups and canonically sorts `records`. Without an explicit range the
    /// range spans the first and last local event dates.
    static Cohort assemble(std::vector<EventRecord> records,
                           std::map<std::string, ParticipantProfile> profiles,
                           std::chrono::minutes utc_offset = std::chrono::minutes{0},
                           std::optional<std::pair<Date, Date>> range = std::nullopt);

    std::size_t range_days() const;
};

// Validation ----------------------------------------------------------------

struct ParticipantValidation {
    std::string participant_id;
    std::size_t recorded_days = 0;  // days in range with at least one event
    std::size_t gap_days = 0;       // days in range with none
    bool has_profile = false;
    bool profile_complete = false;
    std::vector<std::string> missing_profile_fields;

    /// "complete", "incomplete profile", "gapped" or "no events".
    std::string status() const;
};

struct ValidationReport {
    Date start_date{};
    Date end_date{};
    std::vector<ParticipantValidation> participants;  // sorted by id

    /// Ids with a complete profile and at least `min_days` recorded days.
    std::vector<std::string> eligible(std::size_t min_days) const;
};

ValidationReport validate_cohort(const Cohort& cohort);

/// Sub-cohort restricted to `report.eligible(min_days)`.
Cohort filter_cohort(const Cohort& cohort, const ValidationReport& report, std::size_t min_days);

/// Same as filter_cohort but only requires recorded days (profiles ignored).
Cohort filter_by_days(const Cohort& cohort, const ValidationReport& report, std::size_t min_days);

std::string validation_to_json(const ValidationReport& report);

}  // namespace latentflow
