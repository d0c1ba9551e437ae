#include <gtest/gtest.h>

#include <numeric>
#include <set>
#include <sstream>

#include "latentflow/error.hpp"
#include "latentflow/synthgen.hpp"
#include "latentflow/time.hpp"

using namespace latentflow;

namespace {

GenerateOptions small(std::size_t per, std::size_t days, std::uint64_t seed) {
    GenerateOptions o;
    o.participants_per_archetype = per;
    o.days = days;
    o.seed = seed;
    return o;
}

}  // namespace

TEST(Archetypes, ReferenceSetIsValidAndDistinct) {
    const auto arch = reference_archetypes();
    ASSERT_EQ(arch.size(), 5u);
    std::set<std::string> names;
    for (const auto& a : arch) {
        EXPECT_NO_THROW(a.validate());
        names.insert(a.name);
    }
    EXPECT_EQ(names.size(), 5u);
}

TEST(Archetypes, ValidateNamesTheProblem) {
    auto a = reference_archetypes().front();
    a.transitions[3](0, 1) += 0.5;
    try {
        a.validate();
        FAIL() << "expected ContractViolation";
    } catch (const ContractViolation& e) {
        EXPECT_NE(std::string(e.what()).find("hour 3"), std::string::npos);
    }
    a = reference_archetypes().front();
    a.wake_hour_sd = -1.0;
    EXPECT_THROW(a.validate(), ContractViolation);
    a = reference_archetypes().front();
    a.initial.pop_back();
    EXPECT_THROW(a.validate(), ContractViolation);
}

TEST(Archetypes, BlendEndpointsAndRows) {
    const auto arch = reference_archetypes();
    const auto& a = arch[0];
    const auto& b = arch[3];
    EXPECT_EQ(blend_archetypes(a, b, 0.0).transitions[9], a.transitions[9]);
    const auto one = blend_archetypes(a, b, 1.0);
    EXPECT_EQ(one.transitions[9], b.transitions[9]);
    EXPECT_EQ(one.name, a.name);
    const auto mid = blend_archetypes(a, b, 0.37);
    EXPECT_NO_THROW(mid.validate());
    EXPECT_NEAR(mid.wake_hour_mean, 0.63 * a.wake_hour_mean + 0.37 * b.wake_hour_mean, 1e-12);
    EXPECT_THROW(blend_archetypes(a, b, 1.5), ContractViolation);
}

TEST(Generate, SingleDayHasEventsInsideTheDay) {
    const auto arch = reference_archetypes();
    const auto syn = generate_cohort(std::span(arch).first(1), small(1, 1, 7));
    ASSERT_EQ(syn.cohort.events.size(), 1u);
    const auto& [id, events] = *syn.cohort.events.begin();
    EXPECT_EQ(id, "p001");
    ASSERT_FALSE(events.empty());
    const Date day = syn.cohort.start_date;
    for (const auto& e : events) EXPECT_EQ(local_date(e.timestamp, std::chrono::minutes{0}), day);
    EXPECT_EQ(syn.ground_truth.at(id), arch[0].name);
}

TEST(Generate, FullShapeEveryDayRecorded) {
    const auto arch = reference_archetypes();
    const auto syn = generate_cohort(arch, small(10, 180, 1));
    EXPECT_EQ(syn.cohort.events.size(), 50u);
    EXPECT_EQ(syn.cohort.profiles.size(), 50u);
    EXPECT_EQ(syn.cohort.range_days(), 180u);
    const auto report = validate_cohort(syn.cohort);
    std::size_t days = 0;
    for (const auto& p : report.participants) {
        EXPECT_EQ(p.status(), "complete") << p.participant_id;
        days += p.recorded_days;
    }
    EXPECT_EQ(days, 9000u);
    // primary archetype assignment cycles through the list
    EXPECT_EQ(syn.ground_truth.at("p001"), arch[0].name);
    EXPECT_EQ(syn.ground_truth.at("p007"), arch[1].name);
}

TEST(Generate, ProfilesAreInRangeAndOrdered) {
    const auto syn = generate_cohort(reference_archetypes(), small(4, 30, 2));
    for (const auto& [id, p] : syn.cohort.profiles) {
        EXPECT_TRUE(p.is_complete()) << id;
        EXPECT_GE(*p.mmse, 0.0);
        EXPECT_LE(*p.mmse, 30.0);
        EXPECT_GE(*p.adas_cog, 0.0);
        EXPECT_LE(*p.adas_cog, 70.0);
        EXPECT_EQ(*p.assessment_date, syn.cohort.end_date);
        EXPECT_GE(days_between(*p.prior_assessment_date, *p.assessment_date), 200);
    }
}

TEST(Generate, SeedDeterminesOutput) {
    const auto arch = reference_archetypes();
    const auto a = generate_cohort(arch, small(2, 10, 5));
    const auto b = generate_cohort(arch, small(2, 10, 5));
    const auto c = generate_cohort(arch, small(2, 10, 6));
    EXPECT_EQ(flatten_events(a.cohort), flatten_events(b.cohort));
    EXPECT_EQ(a.cohort.profiles, b.cohort.profiles);
    EXPECT_NE(flatten_events(a.cohort), flatten_events(c.cohort));
}

TEST(Generate, MixingCanBeDisabled) {
    const auto arch = reference_archetypes();
    auto o = small(1, 5, 3);
    o.max_secondary_share = 0.0;
    EXPECT_NO_THROW(generate_cohort(arch, o));
    o.max_secondary_share = 1.5;
    EXPECT_THROW(generate_cohort(arch, o), ContractViolation);
    o.max_secondary_share = 0.3;
    o.days = 0;
    EXPECT_THROW(generate_cohort(arch, o), ContractViolation);
}

TEST(Generate, EventsRoundTripThroughTheParser) {
    const auto syn = generate_cohort(reference_archetypes(), small(1, 7, 4));
    const auto events = flatten_events(syn.cohort);
    std::ostringstream out;
    write_events(out, events);
    std::istringstream in(out.str());
    const auto parsed = parse_events(in);
    ASSERT_TRUE(parsed.ok());
    EXPECT_EQ(parsed.records, events);
    EXPECT_TRUE(std::is_sorted(events.begin(), events.end(), canonical_less));

    std::ostringstream profiles;
    write_profiles(profiles, syn.cohort.profiles);
    std::istringstream pin(profiles.str());
    EXPECT_EQ(read_profiles(pin), syn.cohort.profiles);
}

TEST(GroundTruth, CsvRoundTrip) {
    const std::map<std::string, std::string> truth = {{"p001", "lounge_sitter"}, {"p002", "night_owl"}};
    std::ostringstream out;
    write_ground_truth(out, truth);
    EXPECT_EQ(out.str().substr(0, 27), "participant_id,archetype\np0");
    std::istringstream in(out.str());
    EXPECT_EQ(read_ground_truth(in), truth);
}
