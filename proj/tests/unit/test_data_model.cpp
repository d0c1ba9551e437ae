#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "latentflow/data_model.hpp"
#include "latentflow/error.hpp"
#include "latentflow/time.hpp"

using namespace latentflow;

namespace {

ParsedEvents parse(const std::string& text) {
    std::istringstream in(text);
    return parse_events(in);
}

EventRecord entry(const std::string& id, const std::string& ts, const std::string& loc) {
    return {id, *parse_rfc3339(ts), EventKind::location_entry, loc};
}

ParticipantProfile full_profile(const std::string& id) {
    ParticipantProfile p;
    p.participant_id = id;
    p.age = 80;
    p.lives_alone = true;
    p.mmse = 24;
    p.adas_cog = 20;
    p.hads_depression = 5;
    p.hads_anxiety = 6;
    p.mmse_prior = 25;
    p.adas_cog_prior = 18;
    p.assessment_date = *parse_iso_date("2024-01-30");
    p.prior_assessment_date = *parse_iso_date("2023-01-30");
    return p;
}

}  // namespace

TEST(ParseEvents, SingleLocationEntry) {
    const auto r = parse(R"({"participant":"p1","ts":"2023-08-01T09:00:00Z","kind":"location_entry","location":"kitchen"})");
    ASSERT_TRUE(r.issues.empty());
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.records[0], entry("p1", "2023-08-01T09:00:00Z", "kitchen"));
}

TEST(ParseEvents, EmptyInput) {
    const auto r = parse("");
    EXPECT_TRUE(r.records.empty());
    EXPECT_TRUE(r.issues.empty());
}

TEST(ParseEvents, TenLineFixtureFlagsExactlyTheBadLines) {
    const std::string text =
        R"({"participant":"p1","ts":"2023-08-01T09:00:00Z","kind":"location_entry","location":"kitchen"})" "\n"
        R"({"participant":"p1","ts":"2023-08-01T22:00:00Z","kind":"bed_enter","location":"bedroom"})" "\n"
        R"({"participant":"p1","ts":"2023-08-01T22:00:00Z","kind":"bed_enter"})" "\n"
        R"({"participant":"p1","ts":"2023-08-02T06:00:00Z","kind":"bed_leave"})" "\n"
        R"({"participant":"p1","ts":"2023-08-02T06:01:00Z","kind":"teleport","location":"kitchen"})" "\n"
        R"({"participant":"p1","ts":"2023-08-02T06:02:00Z","kind":"location_entry"})" "\n"
        R"({"participant":"p1","ts":"not a time","kind":"location_entry","location":"hallway"})" "\n"
        R"({"participant":"p1","ts":"2023-08-02T06:03:00Z","kind":"location_entry","location":"Kitchen"})" "\n"
        "{broken json\n"
        R"({"participant":"p2","ts":"2023-08-02T06:04:00+01:00","kind":"location_entry","location":"garden_shed"})" "\n";
    const auto r = parse(text);
    std::vector<std::size_t> lines;
    for (const auto& i : r.issues) lines.push_back(i.line);
    EXPECT_EQ(lines, (std::vector<std::size_t>{2, 5, 6, 7, 8, 9}));
    ASSERT_EQ(r.records.size(), 4u);
    // unknown location tokens are accepted
    EXPECT_EQ(r.records[3].location, "garden_shed");
    EXPECT_EQ(format_rfc3339(r.records[3].timestamp), "2023-08-02T05:04:00Z");
}

TEST(ParseEvents, SerializeRoundTrip) {
    std::mt19937_64 gen(5);
    const std::vector<std::string> rooms = {"lounge", "kitchen", "hallway", "bedroom", "bathroom", "x-1"};
    std::vector<EventRecord> records;
    for (int i = 0; i < 500; ++i) {
        EventRecord e;
        e.participant_id = "p" + std::to_string(gen() % 7);
        e.timestamp = Timestamp{std::chrono::seconds{1690000000 + static_cast<long>(gen() % 10000000)}};
        const auto k = gen() % 3;
        e.kind = k == 0 ? EventKind::location_entry : k == 1 ? EventKind::bed_enter : EventKind::bed_leave;
        if (e.kind == EventKind::location_entry) e.location = rooms[gen() % rooms.size()];
        records.push_back(e);
    }
    std::ostringstream out;
    write_events(out, records);
    const auto back = parse(out.str());
    EXPECT_TRUE(back.issues.empty());
    EXPECT_EQ(back.records, records);
}

TEST(Profiles, RoundTripAndMissingFields) {
    std::map<std::string, ParticipantProfile> profiles{{"a", full_profile("a")}};
    auto partial = full_profile("b");
    partial.adas_cog_prior.reset();
    profiles.emplace("b", partial);
    std::ostringstream out;
    write_profiles(out, profiles);
    std::istringstream in(out.str());
    const auto back = read_profiles(in);
    EXPECT_EQ(back, profiles);
    EXPECT_TRUE(back.at("a").is_complete());
    EXPECT_EQ(back.at("b").missing_fields(), std::vector<std::string>{"adas_cog_prior"});
}

TEST(Profiles, RangeViolationsNameTheLine) {
    const std::string header = std::string(kProfilesHeader) + "\n";
    const auto expect_error = [&](const std::string& row, const std::string& fragment) {
        std::istringstream in(header + row + "\n");
        try {
            read_profiles(in);
            FAIL() << "expected DataError for " << row;
        } catch (const DataError& e) {
            EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
        }
    };
    expect_error("p1,80,1,31,20,5,6,25,18,2024-01-30,2023-01-30", "line 2");
    expect_error("p1,80,1,24,-1,5,6,25,18,2024-01-30,2023-01-30", "line 2");
    expect_error("p1,80,1,24,20,5,6,25,18,2023-01-30,2024-01-30", "line 2");
    std::istringstream bad_header("participant,age\n");
    EXPECT_THROW(read_profiles(bad_header), DataError);
}

namespace {

// 60 participants over 180 days; the first 10 have every other day removed.
Cohort gapped_cohort() {
    std::vector<EventRecord> events;
    std::map<std::string, ParticipantProfile> profiles;
    const Date start = *parse_iso_date("2023-08-01");
    for (int p = 0; p < 60; ++p) {
        char id[8];
        std::snprintf(id, sizeof id, "p%02d", p);
        profiles.emplace(id, full_profile(id));
        for (int d = 0; d < 180; ++d) {
            if (p < 10 && d % 2 == 1) continue;
            events.push_back({id, Timestamp{start + std::chrono::days{d}} + std::chrono::hours{9},
                              EventKind::location_entry, "kitchen"});
        }
    }
    return Cohort::assemble(events, profiles, std::chrono::minutes{0},
                            std::make_pair(start, start + std::chrono::days{179}));
}

}  // namespace

TEST(Validation, StatusFlags) {
    Cohort c = gapped_cohort();
    c.profiles["p59"].adas_cog_prior.reset();
    c.profiles.emplace("ghost", full_profile("ghost"));
    const auto report = validate_cohort(c);
    const auto find = [&](const std::string& id) {
        return *std::find_if(report.participants.begin(), report.participants.end(),
                             [&](const auto& v) { return v.participant_id == id; });
    };
    EXPECT_EQ(find("p20").status(), "complete");
    EXPECT_EQ(find("p20").recorded_days, 180u);
    EXPECT_EQ(find("p59").status(), "incomplete profile");
    EXPECT_EQ(find("p00").status(), "gapped");
    EXPECT_EQ(find("p00").gap_days, 90u);
    EXPECT_EQ(find("ghost").status(), "no events");
}

TEST(Validation, MinDaysFilterKeepsFifty) {
    const Cohort c = gapped_cohort();
    const auto report = validate_cohort(c);
    EXPECT_EQ(report.eligible(150).size(), 50u);
    EXPECT_EQ(filter_cohort(c, report, 150).events.size(), 50u);
    EXPECT_EQ(report.eligible(1).size(), 60u);
}

TEST(Validation, IndependentOfEventOrder) {
    const Cohort c = gapped_cohort();
    std::vector<EventRecord> flat;
    for (const auto& [_, ev] : c.events) flat.insert(flat.end(), ev.begin(), ev.end());
    std::shuffle(flat.begin(), flat.end(), std::mt19937_64(3));
    const Cohort shuffled =
        Cohort::assemble(flat, c.profiles, std::chrono::minutes{0}, std::make_pair(c.start_date, c.end_date));
    EXPECT_EQ(validation_to_json(validate_cohort(shuffled)), validation_to_json(validate_cohort(c)));
}
