#include <set>

#include <json.hpp>

#include "latentflow/data_model.hpp"

namespace latentflow {

std::string ParticipantValidation::status() const {
    if (recorded_days == 0) return "no events";
    if (!profile_complete) return "incomplete profile";
    if (gap_days > 0) return "gapped";
    return "complete";
}

ValidationReport validate_cohort(const Cohort& cohort) {
    ValidationReport report;
    report.start_date = cohort.start_date;
    report.end_date = cohort.end_date;
    const std::size_t span_days = cohort.range_days();

    std::set<std::string> ids;
    for (const auto& [id, _] : cohort.events) ids.insert(id);
    for (const auto& [id, _] : cohort.profiles) ids.insert(id);

    for (const auto& id : ids) {
        ParticipantValidation v;
        v.participant_id = id;
        if (const auto it = cohort.events.find(id); it != cohort.events.end()) {
            std::set<Date> days;
            for (const auto& e : it->second) {
                const Date d = local_date(e.timestamp, cohort.utc_offset);
                if (!(d < cohort.start_date) && !(cohort.end_date < d)) {
                    days.insert(d);
                }
            }
            v.recorded_days = days.size();
        }
        v.gap_days = span_days - v.recorded_days;
        if (const auto it = cohort.profiles.find(id); it != cohort.profiles.end()) {
            v.has_profile = true;
            v.missing_profile_fields = it->second.missing_fields();
            v.profile_complete = v.missing_profile_fields.empty();
        } else {
            v.missing_profile_fields = {"profile"};
        }
        report.participants.push_back(std::move(v));
    }
    return report;
}

std::vector<std::string> ValidationReport::eligible(std::size_t min_days) const {
    std::vector<std::string> ids;
    for (const auto& p : participants) {
        if (p.profile_complete && p.recorded_days >= min_days && p.recorded_days > 0) {
            ids.push_back(p.participant_id);
        }
    }
    return ids;
}

namespace {

Cohort restrict_to(const Cohort& cohort, const std::vector<std::string>& keep) {
    Cohort out;
    out.start_date = cohort.start_date;
    out.end_date = cohort.end_date;
    out.utc_offset = cohort.utc_offset;
    for (const auto& id : keep) {
        if (const auto it = cohort.events.find(id); it != cohort.events.end()) {
            out.events.emplace(id, it->second);
        }
        if (const auto it = cohort.profiles.find(id); it != cohort.profiles.end()) {
            out.profiles.emplace(id, it->second);
        }
    }
    return out;
}

}  // namespace

Cohort filter_cohort(const Cohort& cohort, const ValidationReport& report, std::size_t min_days) {
    return restrict_to(cohort, report.eligible(min_days));
}

Cohort filter_by_days(const Cohort& cohort, const ValidationReport& report, std::size_t min_days) {
    std::vector<std::string> keep;
    for (const auto& p : report.participants) {
        if (p.recorded_days >= min_days && p.recorded_days > 0) {
            keep.push_back(p.participant_id);
        }
    }
    return restrict_to(cohort, keep);
}

std::string validation_to_json(const ValidationReport& report) {
    nlohmann::ordered_json j;
    j["start_date"] = format_iso_date(report.start_date);
    j["end_date"] = format_iso_date(report.end_date);
    auto& rows = j["participants"] = nlohmann::ordered_json::array();
    for (const auto& p : report.participants) {
        nlohmann::ordered_json row;
        row["participant_id"] = p.participant_id;
        row["status"] = p.status();
        row["recorded_days"] = p.recorded_days;
        row["gap_days"] = p.gap_days;
        row["profile_complete"] = p.profile_complete;
        row["missing_profile_fields"] = p.missing_profile_fields;
        rows.push_back(std::move(row));
    }
    return j.dump(2);
}

}  // namespace latentflow
