#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "latentflow/error.hpp"
#include "latentflow/matrix.hpp"
#include "latentflow/preprocess.hpp"

namespace latentflow {

inline constexpr int kDefaultTripletWindowDays = 30;

struct Triplet {
    DayKey anchor;
    DayKey positive;
    DayKey negative;

    bool operator==(const Triplet&) const = default;
};

struct TripletSet {
    std::vector<Triplet> triplets;
    std::uint64_t seed = 0;
    int window_days = kDefaultTripletWindowDays;

    bool operator==(const TripletSet&) const = default;
};

/// No anchor in the collection has both an eligible positive and a negative.
class TripletExhaustedError : public Error {
public:
    using Error::Error;
};

/// Row-per-day one-hot encoding of the slot tokens.
///
/// Column s * |vocabulary| + v is 1 when slot s holds vocabulary[v]. The
/// vocabulary always starts with "nowhere", followed by the other tokens
/// seen in the collection in lexicographic order.
struct OneHotEncoding {
    std::vector<std::string> vocabulary;
    std::size_t slots = 0;
    std::vector<DayKey> keys;
    Matrix rows;
};

OneHotEncoding one_hot_encode(std::span<const DayString> days);

/// Cluster-based contrastive sampling.
///
/// A positive for anchor a is another day of the same participant, at most
/// `window_days` calendar days away, carrying the same cluster label. Every
/// other day except the anchor is a negative candidate. Anchors are drawn
/// uniformly among days that have at least one positive and one negative;
/// positives and negatives uniformly from their candidate sets.
/// `labels[i]` is the cluster of `days[i]`.
TripletSet select_triplets(std::span<const DayString> days, std::span<const int> labels,
                           std::size_t count, int window_days = kDefaultTripletWindowDays,
                           std::uint64_t seed = 0);

/// JSONL: a header line {"seed":..,"window_days":..,"count":..} then one
/// {"anchor":[id,date],"positive":[id,date],"negative":[id,date]} per line.
void write_triplets(std::ostream& out, const TripletSet& set);
TripletSet read_triplets(std::istream& in);
TripletSet read_triplets_file(const std::filesystem::path& path);

}  // namespace latentflow
