#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "latentflow/data_model.hpp"
#include "latentflow/matrix.hpp"

namespace latentflow {

/// Location that emits no sensor events (participant is out of the home).
inline constexpr std::string_view kAwayLocation = "away";

struct ClinicalPrior {
    double age_mean = 78.0, age_sd = 6.0;
    double mmse_mean = 22.0, mmse_sd = 3.0;
    double adas_cog_mean = 30.0, adas_cog_sd = 6.0;
    double hads_depression_mean = 6.0, hads_depression_sd = 2.0;
    double hads_anxiety_mean = 6.0, hads_anxiety_sd = 2.0;
    double mmse_drift_mean = -1.5;     // points per year
    double adas_cog_drift_mean = 3.0;  // points per year
    double drift_sd = 1.0;
    double lives_alone_probability = 0.5;
};

/// Generative behaviour profile: an hour-of-day modulated Markov chain over
/// rooms plus night-time and clinical parameters.
struct ArchetypeSpec {
    std::string name;
    std::vector<std::string> locations;
    std::vector<double> initial;               // distribution on waking
    std::array<Matrix, 24> transitions;        // per local hour, row-stochastic
    std::vector<double> mean_dwell_minutes;    // per location
    double sensor_interval_minutes = 12.0;     // mean gap between re-triggers in a room
    double wake_hour_mean = 7.0, wake_hour_sd = 0.5;
    double bed_hour_mean = 22.0, bed_hour_sd = 0.5;  // may exceed 24 (after midnight)
    double night_rise_probability = 0.05;      // per hour asleep
    ClinicalPrior clinical;

    /// Throws ContractViolation when shapes disagree, a transition row does
    /// not sum to 1, or a standard deviation is negative.
    void validate() const;
};

/// Builds an archetype whose hour-h transition row from room a is the hour-h
/// preference weights over the other rooms, normalised.
ArchetypeSpec make_archetype(std::string name, std::vector<std::string> locations,
                             const std::array<std::vector<double>, 24>& hourly_preference,
                             std::vector<double> mean_dwell_minutes);

/// Convex mix (1 - w) a + w b of the behavioural parameters. Clinical
/// parameters and the name come from a. Locations must match.
ArchetypeSpec blend_archetypes(const ArchetypeSpec& a, const ArchetypeSpec& b, double w);

/// The five well-separated archetypes shipped as the reference fixture.
std::vector<ArchetypeSpec> reference_archetypes();

struct GenerateOptions {
    std::size_t participants_per_archetype = 10;
    std::size_t days = 180;
    std::uint64_t seed = 0;
    // Each participant has a second archetype and a share, uniform on
    // [0, max_secondary_share], of days that blend towards it by a uniform
    // weight. 0 disables mixing.
    double max_secondary_share = 0.3;
    Date start_date = Date{std::chrono::year{2023} / std::chrono::July / 31};
};

struct SyntheticCohort {
    Cohort cohort;
    std::map<std::string, std::string> ground_truth;  // participant -> archetype name
};

/// Simulates second-resolution events for every participant-day plus a
/// profile drawn from the archetype's clinical prior. Participant i gets
/// archetype i mod |archetypes| and a seed derived from (seed, i); the ground
/// truth records that primary archetype.
SyntheticCohort generate_cohort(std::span<const ArchetypeSpec> archetypes,
                                const GenerateOptions& options);

/// Separation fixture: the reference archetypes with 4 participants each
/// over 60 days, with the default day mixing.
GenerateOptions separation_fixture(std::uint64_t seed);

/// Flattened events in canonical order.
std::vector<EventRecord> flatten_events(const Cohort& cohort);

/// CSV: participant_id,archetype.
void write_ground_truth(std::ostream& out, const std::map<std::string, std::string>& truth);
std::map<std::string, std::string> read_ground_truth(std::istream& in);

}  // namespace latentflow
