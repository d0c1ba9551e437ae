#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latentflow/clustering.hpp"
#include "latentflow/data_model.hpp"
#include "latentflow/stateflow.hpp"

namespace latentflow {

/// Day count between two dates divided by 365.25.
double years_between(Date earlier, Date later);

/// Annualised change (current - prior) / years. Throws ContractViolation
/// unless prior_date < assessment_date.
double delta_score(double current, double prior, Date assessment_date, Date prior_date);

enum class Metric { l1, l2 };

struct Neighbor {
    std::string participant_id;
    double distance = 0.0;

    bool operator==(const Neighbor&) const = default;
};

struct SimilarityResult {
    std::string query;
    std::vector<Neighbor> most_similar;   // ascending distance
    std::vector<Neighbor> least_similar;  // descending distance

    bool operator==(const SimilarityResult&) const = default;
};

inline constexpr std::size_t kNeighbourCount = 3;
inline constexpr std::size_t kMinRankParticipants = 7;

/// Ranks every other participant by fingerprint distance to `query_id`.
/// Ties break on participant id. Needs at least 7 participants.
SimilarityResult rank_similar(std::span<const StateVector> fingerprints, std::string_view query_id,
                              Metric metric = Metric::l1, std::size_t count = kNeighbourCount);

/// rank_similar for every participant, in id order.
std::vector<SimilarityResult> rank_all(std::span<const StateVector> fingerprints,
                                       Metric metric = Metric::l1,
                                       std::size_t count = kNeighbourCount);

enum class Feature { mmse, adas_cog, hads_depression, hads_anxiety, age, delta_mmse, delta_adas_cog };

inline constexpr std::array<Feature, 7> kAllFeatures = {
    Feature::mmse,         Feature::adas_cog, Feature::hads_depression, Feature::hads_anxiety,
    Feature::age,          Feature::delta_mmse, Feature::delta_adas_cog};

std::string_view to_string(Feature feature);

/// Feature value for a profile, or nullopt when its inputs are missing.
std::optional<double> feature_value(const ParticipantProfile& profile, Feature feature);

struct PairedTTest {
    std::size_t n = 0;
    double mean_difference = 0.0;
    double sd_difference = 0.0;  // sample sd (n - 1)
    double t_statistic = 0.0;
    double p_value = 0.0;  // two-sided, n - 1 degrees of freedom
    double cohens_d = 0.0; // mean / sd of the differences
};

/// Paired two-sided t-test on x - y. Returns nullopt when n < 2 or the
/// differences have zero variance.
std::optional<PairedTTest> paired_t_test(std::span<const double> x, std::span<const double> y);

enum class Side { most, least };

std::string_view to_string(Side side);

struct FeatureComparison {
    Feature feature = Feature::mmse;
    std::size_t n = 0;
    std::optional<double> p_value;
    std::optional<double> cohens_d;
    std::optional<double> t_statistic;
    std::string note;  // "undefined (zero variance)" etc.
};

struct ComparisonReport {
    Side side = Side::most;
    std::vector<FeatureComparison> features;
};

/// Per feature, pairs each participant's own value with the mean over the
/// selected counterparts that have the feature. Participants lacking the
/// feature, or with no counterpart that has it, are left out.
ComparisonReport compare_groups(const std::map<std::string, ParticipantProfile>& profiles,
                                std::span<const SimilarityResult> similarity, Side side);

std::string comparison_to_json(std::span<const ComparisonReport> reports);

/// select_k over the fingerprint vectors.
KSelection cluster_participants(std::span<const StateVector> fingerprints,
                                std::span<const int> k_range, std::uint64_t seed);

/// Default participant-cluster sweep {2..8}.
std::vector<int> default_participant_k_range();

}  // namespace latentflow
