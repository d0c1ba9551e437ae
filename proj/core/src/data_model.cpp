#include "latentflow/data_model.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <tuple>

#include <json.hpp>

#include "latentflow/csv.hpp"
#include "latentflow/error.hpp"

namespace latentflow {

using nlohmann::json;

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::location_entry: return "location_entry";
        case EventKind::bed_enter: return "bed_enter";
        case EventKind::bed_leave: return "bed_leave";
    }
    return "unknown";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
    if (text == "location_entry") return EventKind::location_entry;
    if (text == "bed_enter") return EventKind::bed_enter;
    if (text == "bed_leave") return EventKind::bed_leave;
    return std::nullopt;
}

bool canonical_less(const EventRecord& a, const EventRecord& b) {
    return std::tie(a.participant_id, a.timestamp, a.kind, a.location) <
           std::tie(b.participant_id, b.timestamp, b.kind, b.location);
}

namespace {

bool valid_location_token(std::string_view token) {
    if (token.empty() || token == "nowhere") {
        return false;
    }
    return std::all_of(token.begin(), token.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    });
}

// Returns an error message, or empty on success.
std::string parse_event_line(std::string_view line, EventRecord& out) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        return std::string("invalid JSON: ") + e.what();
    }
    if (!j.is_object()) {
        return "record is not a JSON object";
    }
    for (const auto& [key, _] : j.items()) {
        if (key != "participant" && key != "ts" && key != "kind" && key != "location") {
            return "unexpected field '" + key + "'";
        }
    }
    const auto participant = j.find("participant");
    if (participant == j.end() || !participant->is_string() ||
        participant->get_ref<const std::string&>().empty()) {
        return "missing or empty 'participant'";
    }
    const auto ts = j.find("ts");
    if (ts == j.end() || !ts->is_string()) {
        return "missing 'ts'";
    }
    const auto when = parse_rfc3339(ts->get_ref<const std::string&>());
    if (!when) {
        return "'ts' is not an RFC 3339 timestamp with whole seconds";
    }
    const auto kind_field = j.find("kind");
    if (kind_field == j.end() || !kind_field->is_string()) {
        return "missing 'kind'";
    }
    const auto kind = parse_event_kind(kind_field->get_ref<const std::string&>());
    if (!kind) {
        return "unknown kind '" + kind_field->get<std::string>() + "'";
    }
    const auto location = j.find("location");
    std::string location_token;
    if (*kind == EventKind::location_entry) {
        if (location == j.end() || !location->is_string()) {
            return "location_entry requires 'location'";
        }
        location_token = location->get<std::string>();
        if (!valid_location_token(location_token)) {
            return "invalid location token '" + location_token + "'";
        }
    } else if (location != j.end()) {
        return "'location' is not allowed for " + std::string(to_string(*kind));
    }
    out = EventRecord{participant->get<std::string>(), *when, *kind, std::move(location_token)};
    return {};
}

}  // namespace

ParsedEvents parse_events(std::istream& in) {
    ParsedEvents result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) {
            continue;
        }
        EventRecord record;
        auto message = parse_event_line(line, record);
        if (message.empty()) {
            result.records.push_back(std::move(record));
        } else {
            result.issues.push_back({line_no, std::move(message)});
        }
    }
    if (in.bad()) {
        throw IoError("read failure while parsing events");
    }
    return result;
}

ParsedEvents read_events_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open events file " + path.string());
    }
    return parse_events(in);
}

std::string serialize_event(const EventRecord& event) {
    // Fixed key order keeps output byte-stable.
    std::string out = "{\"participant\":";
    out += json(event.participant_id).dump();
    out += ",\"ts\":\"";
    out += format_rfc3339(event.timestamp);
    out += "\",\"kind\":\"";
    out += to_string(event.kind);
    out += '"';
    if (event.kind == EventKind::location_entry) {
        out += ",\"location\":";
        out += json(event.location).dump();
    }
    out += '}';
    return out;
}

void write_events(std::ostream& out, std::span<const EventRecord> events) {
    for (const auto& e : events) {
        out << serialize_event(e) << '\n';
    }
}

void write_events_file(const std::filesystem::path& path, std::span<const EventRecord> events) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    write_events(out, events);
}

// Profiles ---------------------------------------------------------------------

std::vector<std::string> ParticipantProfile::missing_fields() const {
    std::vector<std::string> missing;
    if (!age) missing.emplace_back("age");
    if (!lives_alone) missing.emplace_back("lives_alone");
    if (!mmse) missing.emplace_back("mmse");
    if (!adas_cog) missing.emplace_back("adas_cog");
    if (!hads_depression) missing.emplace_back("hads_depression");
    if (!hads_anxiety) missing.emplace_back("hads_anxiety");
    if (!mmse_prior) missing.emplace_back("mmse_prior");
    if (!adas_cog_prior) missing.emplace_back("adas_cog_prior");
    if (!assessment_date) missing.emplace_back("assessment_date");
    if (!prior_assessment_date) missing.emplace_back("prior_assessment_date");
    return missing;
}

namespace {

std::optional<double> optional_number(const std::string& cell, std::size_t line, const char* name) {
    if (csv::trim(cell).empty()) {
        return std::nullopt;
    }
    const auto value = csv::parse_number(cell);
    if (!value || !std::isfinite(*value)) {
        throw DataError("profiles line " + std::to_string(line) + ": '" + name +
                        "' is not a number");
    }
    return value;
}

std::optional<Date> optional_date(const std::string& cell, std::size_t line, const char* name) {
    const auto text = csv::trim(cell);
    if (text.empty()) {
        return std::nullopt;
    }
    const auto date = parse_iso_date(text);
    if (!date) {
        throw DataError("profiles line " + std::to_string(line) + ": '" + name +
                        "' is not an ISO date");
    }
    return date;
}

std::optional<bool> optional_bool(const std::string& cell, std::size_t line) {
    const auto text = csv::trim(cell);
    if (text.empty()) return std::nullopt;
    if (text == "1" || text == "true" || text == "yes") return true;
    if (text == "0" || text == "false" || text == "no") return false;
    throw DataError("profiles line " + std::to_string(line) + ": 'lives_alone' is not a boolean");
}

void check_ranges(const ParticipantProfile& p, std::size_t line) {
    const auto fail = [line](const std::string& what) {
        throw DataError("profiles line " + std::to_string(line) + ": " + what);
    };
    for (const auto& score : {p.mmse, p.mmse_prior}) {
        if (score && (*score < 0.0 || *score > 30.0)) fail("MMSE outside [0, 30]");
    }
    for (const auto& score : {p.adas_cog, p.adas_cog_prior}) {
        if (score && *score < 0.0) fail("ADAS-Cog is negative");
    }
    if (p.assessment_date && p.prior_assessment_date &&
        !(*p.prior_assessment_date < *p.assessment_date)) {
        fail("prior_assessment_date must precede assessment_date");
    }
}

std::string optional_cell(const std::optional<double>& v) {
    return v ? csv::format_number(*v) : std::string();
}

}  // namespace

std::map<std::string, ParticipantProfile> read_profiles(std::istream& in) {
    std::map<std::string, ParticipantProfile> profiles;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        return profiles;
    }
    ++line_no;
    if (csv::trim(line) != kProfilesHeader) {
        throw DataError("profiles header must be: " + std::string(kProfilesHeader));
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) {
            continue;
        }
        std::vector<std::string> cells;
        try {
            cells = csv::split(line);
        } catch (const DataError& e) {
            throw DataError("profiles line " + std::to_string(line_no) + ": " + e.what());
        }
        if (cells.size() != 11) {
            throw DataError("profiles line " + std::to_string(line_no) + ": expected 11 columns, got " +
                            std::to_string(cells.size()));
        }
        ParticipantProfile p;
        p.participant_id = std::string(csv::trim(cells[0]));
        if (p.participant_id.empty()) {
            throw DataError("profiles line " + std::to_string(line_no) + ": empty participant_id");
        }
        p.age = optional_number(cells[1], line_no, "age");
        p.lives_alone = optional_bool(cells[2], line_no);
        p.mmse = optional_number(cells[3], line_no, "mmse");
        p.adas_cog = optional_number(cells[4], line_no, "adas_cog");
        p.hads_depression = optional_number(cells[5], line_no, "hads_depression");
        p.hads_anxiety = optional_number(cells[6], line_no, "hads_anxiety");
        p.mmse_prior = optional_number(cells[7], line_no, "mmse_prior");
        p.adas_cog_prior = optional_number(cells[8], line_no, "adas_cog_prior");
        p.assessment_date = optional_date(cells[9], line_no, "assessment_date");
        p.prior_assessment_date = optional_date(cells[10], line_no, "prior_assessment_date");
        check_ranges(p, line_no);
        const auto id = p.participant_id;
        if (!profiles.emplace(id, std::move(p)).second) {
            throw DataError("profiles line " + std::to_string(line_no) + ": duplicate participant '" +
                            id + "'");
        }
    }
    return profiles;
}

std::map<std::string, ParticipantProfile> read_profiles_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open profiles file " + path.string());
    }
    return read_profiles(in);
}

void write_profiles(std::ostream& out, const std::map<std::string, ParticipantProfile>& profiles) {
    out << kProfilesHeader << '\n';
    for (const auto& [id, p] : profiles) {
        out << csv::escape(id) << ',' << optional_cell(p.age) << ','
            << (p.lives_alone ? (*p.lives_alone ? "1" : "0") : "") << ',' << optional_cell(p.mmse)
            << ',' << optional_cell(p.adas_cog) << ',' << optional_cell(p.hads_depression) << ','
            << optional_cell(p.hads_anxiety) << ',' << optional_cell(p.mmse_prior) << ','
            << optional_cell(p.adas_cog_prior) << ','
            << (p.assessment_date ? format_iso_date(*p.assessment_date) : "") << ','
            << (p.prior_assessment_date ? format_iso_date(*p.prior_assessment_date) : "") << '\n';
    }
}

// Cohort -----------------------------------------------------------------------

Cohort Cohort::assemble(std::vector<EventRecord> records,
                        std::map<std::string, ParticipantProfile> profiles,
                        std::chrono::minutes utc_offset,
                        std::optional<std::pair<Date, Date>> range) {
    Cohort cohort;
    cohort.utc_offset = utc_offset;
    cohort.profiles = std::move(profiles);
    std::sort(records.begin(), records.end(), canonical_less);
    std::optional<Date> first, last;
    for (auto& r : records) {
        const Date d = local_date(r.timestamp, utc_offset);
        if (!first || d < *first) first = d;
        if (!last || *last < d) last = d;
        auto id = r.participant_id;
        cohort.events[id].push_back(std::move(r));
    }
    if (range) {
        if (range->second < range->first) {
            throw ContractViolation("cohort date range ends before it starts");
        }
        cohort.start_date = range->first;
        cohort.end_date = range->second;
    } else if (first) {
        cohort.start_date = *first;
        cohort.end_date = *last;
    }
    return cohort;
}

std::size_t Cohort::range_days() const {
    if (events.empty() && start_date == Date{} && end_date == Date{}) {
        return 0;
    }
    return static_cast<std::size_t>(days_between(start_date, end_date) + 1);
}

}  // namespace latentflow
