#include "latentflow/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "latentflow/error.hpp"

namespace latentflow {

double years_between(Date earlier, Date later) {
    return static_cast<double>(days_between(earlier, later)) / 365.25;
}

double delta_score(double current, double prior, Date assessment_date, Date prior_date) {
    if (!(prior_date < assessment_date)) {
        throw ContractViolation("delta_score: prior assessment must precede the current one");
    }
    return (current - prior) / years_between(prior_date, assessment_date);
}

namespace {

double distance(std::span<const double> a, std::span<const double> b, Metric metric) {
    if (a.size() != b.size()) {
        throw DataError("fingerprints have different lengths");
    }
    return metric == Metric::l1 ? l1_distance(a, b) : euclidean(a, b);
}

}  // namespace

SimilarityResult rank_similar(std::span<const StateVector> fingerprints, std::string_view query_id,
                              Metric metric, std::size_t count) {
    if (fingerprints.size() < kMinRankParticipants) {
        throw ContractViolation("rank_similar needs at least " + std::to_string(kMinRankParticipants) +
                                " participants");
    }
    const auto query = std::find_if(fingerprints.begin(), fingerprints.end(),
                                    [&](const StateVector& s) { return s.participant_id == query_id; });
    if (query == fingerprints.end()) {
        throw DataError("unknown participant '" + std::string(query_id) + "'");
    }
    std::vector<Neighbor> all;
    for (const auto& s : fingerprints) {
        if (s.participant_id == query_id) continue;
        all.push_back({s.participant_id, distance(query->values, s.values, metric)});
    }
    std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
        return a.distance != b.distance ? a.distance < b.distance : a.participant_id < b.participant_id;
    });
    SimilarityResult r;
    r.query = std::string(query_id);
    const std::size_t m = std::min(count, all.size());
    r.most_similar.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(m));
    std::vector<Neighbor> far = all;
    std::sort(far.begin(), far.end(), [](const Neighbor& a, const Neighbor& b) {
        return a.distance != b.distance ? a.distance > b.distance : a.participant_id < b.participant_id;
    });
    r.least_similar.assign(far.begin(), far.begin() + static_cast<std::ptrdiff_t>(m));
    return r;
}

std::vector<SimilarityResult> rank_all(std::span<const StateVector> fingerprints, Metric metric,
                                       std::size_t count) {
    std::set<std::string> ids;
    for (const auto& s : fingerprints) {
        if (!ids.insert(s.participant_id).second) {
            throw DataError("duplicate fingerprint for '" + s.participant_id + "'");
        }
    }
    std::vector<SimilarityResult> out;
    for (const auto& id : ids) out.push_back(rank_similar(fingerprints, id, metric, count));
    return out;
}

std::string_view to_string(Feature feature) {
    switch (feature) {
        case Feature::mmse: return "MMSE";
        case Feature::adas_cog: return "ADAS-Cog";
        case Feature::hads_depression: return "HADS-Depression";
        case Feature::hads_anxiety: return "HADS-Anxiety";
        case Feature::age: return "Age";
        case Feature::delta_mmse: return "Delta-MMSE";
        case Feature::delta_adas_cog: return "Delta-ADAS-Cog";
    }
    return "unknown";
}

std::string_view to_string(Side side) {
    return side == Side::most ? "most" : "least";
}

std::optional<double> feature_value(const ParticipantProfile& p, Feature feature) {
    const auto delta = [&](const std::optional<double>& now,
                           const std::optional<double>& before) -> std::optional<double> {
        if (!now || !before || !p.assessment_date || !p.prior_assessment_date ||
            !(*p.prior_assessment_date < *p.assessment_date)) {
            return std::nullopt;
        }
        return delta_score(*now, *before, *p.assessment_date, *p.prior_assessment_date);
    };
    switch (feature) {
        case Feature::mmse: return p.mmse;
        case Feature::adas_cog: return p.adas_cog;
        case Feature::hads_depression: return p.hads_depression;
        case Feature::hads_anxiety: return p.hads_anxiety;
        case Feature::age: return p.age;
        case Feature::delta_mmse: return delta(p.mmse, p.mmse_prior);
        case Feature::delta_adas_cog: return delta(p.adas_cog, p.adas_cog_prior);
    }
    return std::nullopt;
}

std::optional<PairedTTest> paired_t_test(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw ContractViolation("paired_t_test: samples differ in length");
    }
    const std::size_t n = x.size();
    if (n < 2) return std::nullopt;
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x[i] - y[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (x[i] - y[i]) - mean;
        ss += r * r;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) return std::nullopt;

    PairedTTest out;
    out.n = n;
    out.mean_difference = mean;
    out.sd_difference = sd;
    out.t_statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
    out.cohens_d = mean / sd;
    const boost::math::students_t dist(static_cast<double>(n - 1));
    out.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(out.t_statistic))));
    return out;
}

ComparisonReport compare_groups(const std::map<std::string, ParticipantProfile>& profiles,
                                std::span<const SimilarityResult> similarity, Side side) {
    ComparisonReport report;
    report.side = side;
    for (const Feature feature : kAllFeatures) {
        std::vector<double> own, counterpart;
        for (const auto& r : similarity) {
            const auto self = profiles.find(r.query);
            if (self == profiles.end()) continue;
            const auto x = feature_value(self->second, feature);
            if (!x) continue;
            const auto& group = side == Side::most ? r.most_similar : r.least_similar;
            double sum = 0.0;
            std::size_t used = 0;
            for (const auto& nb : group) {
                const auto it = profiles.find(nb.participant_id);
                if (it == profiles.end()) continue;
                if (const auto v = feature_value(it->second, feature)) {
                    sum += *v;
                    ++used;
                }
            }
            if (used == 0) continue;
            own.push_back(*x);
            counterpart.push_back(sum / static_cast<double>(used));
        }
        FeatureComparison fc;
        fc.feature = feature;
        fc.n = own.size();
        if (const auto test = paired_t_test(own, counterpart)) {
            fc.p_value = test->p_value;
            fc.cohens_d = test->cohens_d;
            fc.t_statistic = test->t_statistic;
        } else {
            fc.note = own.size() < 2 ? "undefined (fewer than 2 pairs)" : "undefined (zero variance)";
        }
        report.features.push_back(std::move(fc));
    }
    return report;
}

std::string comparison_to_json(std::span<const ComparisonReport> reports) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    j["test"] = "paired two-sided t-test";
    j["counterparts"] = kNeighbourCount;
    auto& sides = j["comparisons"] = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        nlohmann::ordered_json side;
        side["side"] = to_string(r.side);
        auto& rows = side["features"] = nlohmann::ordered_json::array();
        for (const auto& f : r.features) {
            nlohmann::ordered_json row;
            row["feature"] = to_string(f.feature);
            row["n"] = f.n;
            row["p_value"] = f.p_value ? nlohmann::ordered_json(*f.p_value) : nlohmann::ordered_json();
            row["cohens_d"] = f.cohens_d ? nlohmann::ordered_json(*f.cohens_d) : nlohmann::ordered_json();
            row["t_statistic"] =
                f.t_statistic ? nlohmann::ordered_json(*f.t_statistic) : nlohmann::ordered_json();
            if (!f.note.empty()) row["note"] = f.note;
            rows.push_back(std::move(row));
        }
        sides.push_back(std::move(side));
    }
    return j.dump(2);
}

KSelection cluster_participants(std::span<const StateVector> fingerprints, std::span<const int> k_range,
                                std::uint64_t seed) {
    if (fingerprints.empty() || k_range.empty()) {
        throw ContractViolation("cluster_participants: no fingerprints or empty k range");
    }
    const int max_k = *std::max_element(k_range.begin(), k_range.end());
    if (fingerprints.size() < static_cast<std::size_t>(max_k) + 1) {
        throw ContractViolation("cluster_participants needs at least max(k) + 1 participants");
    }
    const std::size_t k = fingerprints.front().values.size();
    Matrix m(fingerprints.size(), k);
    for (std::size_t i = 0; i < fingerprints.size(); ++i) {
        if (fingerprints[i].values.size() != k) {
            throw DataError("fingerprints have different lengths");
        }
        std::copy(fingerprints[i].values.begin(), fingerprints[i].values.end(), m.row(i).begin());
    }
    return select_k(m, k_range, seed);
}

std::vector<int> default_participant_k_range() {
    return {2, 3, 4, 5, 6, 7, 8};
}

}  // namespace latentflow
