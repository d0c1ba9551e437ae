#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "latentflow/matrix.hpp"
#include "latentflow/tsne.hpp"

namespace latentflow {

/// How raw cluster-to-cluster counts are formed.
enum class TransitionMode {
    /// Ordered pairs of distinct points (a in C_i, b in C_j) with d(a, b) <= threshold.
    proximity,
    /// Label pairs of consecutive calendar days. Opt-in extension.
    temporal,
};

/// Row-stochastic k x k matrix for one participant plus the raw counts it came from.
struct TransitionMatrix {
    std::string participant_id;
    int k = 0;
    double threshold = 0.0;
    Matrix counts;
    Matrix values;  // counts normalised per row; all-zero rows become uniform
};

/// Proximity transition matrix over one participant's points. `labels[i]` is
/// the global latent-state label of `points[i]`.
TransitionMatrix build_transition_matrix(std::string participant_id, std::span<const Point2D> points,
                                         std::span<const int> labels, int k, double threshold);

/// Consecutive-day variant: counts (label(d), label(d + 1)) for dates one day apart.
TransitionMatrix build_temporal_transition_matrix(std::string participant_id,
                                                  std::span<const Point2D> points,
                                                  std::span<const int> labels, int k);

/// Median Euclidean distance over all unordered pairs of points. Falls back to
/// the largest pairwise distance when the median is zero, and to 1 when every
/// distance is zero or fewer than two points exist.
double median_pairwise_distance(std::span<const Point2D> points);

struct PageRankOptions {
    double alpha = 0.85;
    int max_iter = 1000;
    double tol = 1e-10;
};

struct StateVector {
    std::string participant_id;
    std::vector<double> values;
    double alpha = 0.85;
    int iterations = 0;
    bool converged = false;
    /// L1 residual ||p(t+1) - p(t)|| after each iteration.
    std::vector<double> residuals;

    /// Shannon entropy of the vector in bits. Reported only.
    double entropy_bits() const;
};

/// Power iteration p <- (1 - alpha)/k + alpha T^T p from the uniform vector,
/// stopping once the L1 step falls below tol. Throws ContractViolation when
/// `transitions` is not row-stochastic.
StateVector pagerank(const Matrix& transitions, const PageRankOptions& options = {});
StateVector pagerank(const TransitionMatrix& transitions, const PageRankOptions& options = {});

struct Fingerprint {
    StateVector state;
    TransitionMatrix transitions;
};

/// build_transition_matrix then pagerank. The threshold defaults to the
/// participant's median pairwise distance.
Fingerprint fingerprint(std::string participant_id, std::span<const Point2D> points,
                        std::span<const int> labels, int k, std::optional<double> threshold = std::nullopt,
                        const PageRankOptions& options = {},
                        TransitionMode mode = TransitionMode::proximity);

/// Fingerprints for every participant present in `points` (sorted by id).
std::vector<Fingerprint> fingerprint_all(std::span<const Point2D> points, std::span<const int> labels,
                                         int k, std::optional<double> threshold = std::nullopt,
                                         const PageRankOptions& options = {},
                                         TransitionMode mode = TransitionMode::proximity);

/// CSV: participant_id,v1,...,vk,alpha,threshold,converged.
void write_fingerprints(std::ostream& out, std::span<const Fingerprint> fingerprints);

/// Reads the fingerprint CSV back into state vectors.
std::vector<StateVector> read_fingerprints(std::istream& in);
std::vector<StateVector> read_fingerprints_file(const std::filesystem::path& path);

}  // namespace latentflow
