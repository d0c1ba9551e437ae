#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "latentflow/error.hpp"
#include "latentflow/matrix.hpp"

namespace latentflow {

class ClusteringError : public Error {
public:
    using Error::Error;
};

struct KMeansOptions {
    int restarts = 10;
    int max_iter = 300;
    double tol = 1e-6;  // relative inertia change
};

struct ClusterModel {
    int k = 0;
    Matrix centroids;         // k x dim
    std::vector<int> labels;  // one per input row, in [0, k)
    double inertia = 0.0;     // sum of squared distances to assigned centroid
    std::uint64_t seed = 0;
    int iterations = 0;
    /// Inertia after each Lloyd iteration of the winning restart.
    std::vector<double> inertia_history;
};

/// k-means++ seeding plus Lloyd iterations, best of `restarts` by inertia.
///
/// Restart r uses a seed derived from (seed, r). An empty cluster is re-seeded
/// at the point farthest from its current centroid. Throws ClusteringError
/// when n < k or when fewer than k distinct points exist.
ClusterModel kmeans_fit(const Matrix& points, int k, std::uint64_t seed,
                        const KMeansOptions& options = {});

/// Index of the nearest centroid (lowest index on ties).
int nearest_centroid(const Matrix& centroids, std::span<const double> point);

/// Mean silhouette under Euclidean distance. Samples in singleton clusters
/// score 0. Throws ClusteringError when fewer than two clusters are present.
double silhouette(const Matrix& points, std::span<const int> labels);

struct KSelection {
    int best_k = 0;
    std::map<int, double> scores;  // silhouette per k
    ClusterModel model;            // fit at best_k
};

/// Highest score wins; scores within 1e-12 of each other tie toward the smaller k.
int pick_best_k(const std::map<int, double>& scores);

/// Fits every k in `k_range` and keeps the best silhouette.
KSelection select_k(const Matrix& points, std::span<const int> k_range, std::uint64_t seed,
                    const KMeansOptions& options = {});

/// JSON {k, centroids, seed, inertia}.
std::string model_to_json(const ClusterModel& model);

}  // namespace latentflow
