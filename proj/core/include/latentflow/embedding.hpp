#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "latentflow/matrix.hpp"
#include "latentflow/preprocess.hpp"
#include "latentflow/triplets.hpp"

namespace latentflow {

inline constexpr std::size_t kDefaultEmbeddingDim = 384;

struct Embedding {
    std::string participant_id;
    Date date;
    std::vector<double> vector;

    DayKey key() const { return {participant_id, date}; }
    bool operator==(const Embedding&) const = default;
};

/// Fixed-dimension collection of day embeddings, unique per (participant, date),
/// kept in insertion order.
class EmbeddingSet {
public:
    explicit EmbeddingSet(std::size_t dimension);

    /// Throws DataError on a dimension mismatch, a non-finite component or a
    /// duplicate key.
    void add(Embedding embedding);

    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    std::span<const Embedding> records() const { return records_; }
    const Embedding& operator[](std::size_t i) const { return records_[i]; }

    const Embedding* find(const DayKey& key) const;

    /// Rows in insertion order.
    Matrix to_matrix() const;

    bool operator==(const EmbeddingSet& other) const { return dimension_ == other.dimension_ && records_ == other.records_; }

private:
    std::size_t dimension_;
    std::vector<Embedding> records_;
    std::map<DayKey, std::size_t> index_;
};

/// TSV rows: participant_id<TAB>date<TAB>v1<TAB>...<TAB>vd. The dimension is
/// taken from the first row; errors name the offending line.
EmbeddingSet read_embeddings(std::istream& in);
EmbeddingSet load_embeddings(const std::filesystem::path& path);
void write_embeddings(std::ostream& out, const EmbeddingSet& set);
void save_embeddings(const std::filesystem::path& path, const EmbeddingSet& set);

/// Deterministic feature-hashing embedding of a day string.
///
/// Features are every (slot, token) pair and every adjacent token bigram.
/// Each is hashed with `seed` to a bucket in [0, dim) and a sign, summed, and
/// the result L2-normalised. Requires dim >= 16.
Embedding hash_embed(const DayString& day, std::size_t dim = kDefaultEmbeddingDim,
                     std::uint64_t seed = 0);

EmbeddingSet hash_embed_all(std::span<const DayString> days,
                            std::size_t dim = kDefaultEmbeddingDim, std::uint64_t seed = 0);

struct TripletScore {
    double accuracy = 0.0;   // fraction with L1(a,p) < L1(a,n)
    double mean_loss = 0.0;  // mean of max(0, L1(a,p) - L1(a,n) + margin)
    std::size_t count = 0;
};

inline constexpr double kDefaultTripletMargin = 1.0;

/// Scores embeddings against triplets under Manhattan distance.
/// Throws DataError naming the triplet when a member has no embedding.
TripletScore triplet_accuracy(const EmbeddingSet& set, const TripletSet& triplets,
                              double margin = kDefaultTripletMargin);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace latentflow
