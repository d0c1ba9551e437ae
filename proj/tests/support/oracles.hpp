#pragma once

// Reference implementations used only by tests. Each is written directly
// from the defining formula and shares no code with the library.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "latentflow/matrix.hpp"
#include "latentflow/preprocess.hpp"
#include "latentflow/triplets.hpp"
#include "latentflow/tsne.hpp"

namespace oracle {

/// Stationary PageRank by a dense LU solve of (I - alpha T^T) p = (1 - alpha)/k.
std::vector<double> pagerank_dense(const latentflow::Matrix& t, double alpha);

/// Ordered-pair scan: counts[l_i][l_j] for every i != j with euclidean distance <= threshold.
latentflow::Matrix proximity_counts(const std::vector<latentflow::Point2D>& points, const std::vector<int>& labels,
                                    int k, double threshold);

/// Mean silhouette from the per-sample a(i), b(i) definition; singletons score 0.
double silhouette(const latentflow::Matrix& points, const std::vector<int>& labels);

/// Adjusted Rand index between two labelings.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

/// Whether a triplet satisfies the sampling rules, checked from scratch.
struct TripletCheck {
    bool positive_ok = false;
    bool negative_ok = false;
};
class TripletChecker {
public:
    TripletChecker(const std::vector<latentflow::DayString>& days, const std::vector<int>& labels, int window_days);
    TripletCheck operator()(const latentflow::Triplet& t) const;

private:
    std::map<latentflow::DayKey, int> label_of_;
    int window_days_;
};
TripletCheck check_triplet(const latentflow::Triplet& t, const std::vector<latentflow::DayString>& days,
                           const std::vector<int>& labels, int window_days);

/// Shannon entropy (bits) of row i of the conditional affinities implied by
/// a bandwidth beta: p_j ∝ exp(-beta * ||x_i - x_j||^2).
double conditional_entropy_bits(const latentflow::Matrix& x, std::size_t i, double beta);

/// Majority token for a list of tokens, ties to the earliest first occurrence.
std::string majority_token(const std::vector<std::string>& tokens);

/// Gaussian blobs: `per_blob` points around each of `centres`, unit sd per axis.
struct Blobs {
    latentflow::Matrix x;
    std::vector<int> labels;
};
Blobs gaussian_blobs(const std::vector<std::vector<double>>& centres, std::size_t per_blob, double sd,
                     std::uint64_t seed);

}  // namespace oracle
