#include "latentflow/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "latentflow/random.hpp"

namespace latentflow {

int nearest_centroid(const Matrix& centroids, std::span<const double> point) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
        const double d = squared_euclidean(centroids.row(c), point);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

namespace {

std::size_t count_distinct_rows(const Matrix& points, std::size_t enough) {
    std::vector<std::size_t> order(points.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto less = [&](std::size_t a, std::size_t b) {
        const auto ra = points.row(a);
        const auto rb = points.row(b);
        return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    };
    std::sort(order.begin(), order.end(), less);
    std::size_t distinct = order.empty() ? 0 : 1;
    for (std::size_t i = 1; i < order.size() && distinct < enough; ++i) {
        if (less(order[i - 1], order[i])) ++distinct;
    }
    return distinct;
}

Matrix plus_plus_seeds(const Matrix& points, int k, Rng& rng) {
    const std::size_t n = points.rows();
    Matrix centroids(static_cast<std::size_t>(k), points.cols());
    std::size_t first = rng.index(n);
    std::copy(points.row(first).begin(), points.row(first).end(), centroids.row(0).begin());
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = squared_euclidean(points.row(i), centroids.row(0));
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (const double v : d2) total += v;
        std::size_t chosen = n - 1;
        const double target = rng.uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += d2[i];
            if (acc > target && d2[i] > 0.0) {
                chosen = i;
                break;
            }
        }
        if (d2[chosen] == 0.0) {
            // rounding pushed us past the end; take the last point with mass
            for (std::size_t i = n; i-- > 0;) {
                if (d2[i] > 0.0) {
                    chosen = i;
                    break;
                }
            }
        }
        const auto row = points.row(chosen);
        std::copy(row.begin(), row.end(), centroids.row(static_cast<std::size_t>(c)).begin());
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], squared_euclidean(points.row(i), row));
        }
    }
    return centroids;
}

double assign(const Matrix& points, const Matrix& centroids, std::vector<int>& labels,
              std::vector<double>& cost) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
        const int c = nearest_centroid(centroids, points.row(i));
        labels[i] = c;
        cost[i] = squared_euclidean(points.row(i), centroids.row(static_cast<std::size_t>(c)));
        inertia += cost[i];
    }
    return inertia;
}

// Moves the farthest point of a multi-member cluster into each empty cluster.
void repair_empty(const Matrix& points, Matrix& centroids, std::vector<int>& labels,
                  std::vector<double>& cost, std::vector<std::size_t>& sizes) {
    const std::size_t k = centroids.rows();
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] > 0) continue;
        std::size_t far = points.rows();
        for (std::size_t i = 0; i < points.rows(); ++i) {
            if (sizes[static_cast<std::size_t>(labels[i])] > 1 && (far == points.rows() || cost[i] > cost[far])) {
                far = i;
            }
        }
        if (far == points.rows()) {
            throw ClusteringError("k-means: cannot repair an empty cluster");
        }
        --sizes[static_cast<std::size_t>(labels[far])];
        labels[far] = static_cast<int>(c);
        sizes[c] = 1;
        cost[far] = 0.0;
        std::copy(points.row(far).begin(), points.row(far).end(), centroids.row(c).begin());
    }
}

void update_means(const Matrix& points, Matrix& centroids, std::vector<int>& labels,
                  std::vector<double>& cost) {
    const std::size_t k = centroids.rows();
    std::vector<std::size_t> sizes(k, 0);
    for (const int l : labels) ++sizes[static_cast<std::size_t>(l)];
    repair_empty(points, centroids, labels, cost, sizes);
    Matrix sums(k, points.cols());
    for (std::size_t i = 0; i < points.rows(); ++i) {
        auto s = sums.row(static_cast<std::size_t>(labels[i]));
        const auto p = points.row(i);
        for (std::size_t d = 0; d < p.size(); ++d) s[d] += p[d];
    }
    for (std::size_t c = 0; c < k; ++c) {
        auto out = centroids.row(c);
        const auto s = sums.row(c);
        for (std::size_t d = 0; d < s.size(); ++d) out[d] = s[d] / static_cast<double>(sizes[c]);
    }
}

ClusterModel lloyd(const Matrix& points, int k, std::uint64_t seed, const KMeansOptions& options) {
    Rng rng(seed);
    ClusterModel model;
    model.k = k;
    model.seed = seed;
    model.centroids = plus_plus_seeds(points, k, rng);
    model.labels.assign(points.rows(), 0);
    std::vector<double> cost(points.rows());

    // rounding slack for the monotonicity check, scaled to the data spread
    double spread = 0.0;
    {
        std::vector<double> mean(points.cols(), 0.0);
        for (std::size_t i = 0; i < points.rows(); ++i) {
            for (std::size_t d = 0; d < points.cols(); ++d) mean[d] += points(i, d);
        }
        for (double& m : mean) m /= static_cast<double>(points.rows());
        for (std::size_t i = 0; i < points.rows(); ++i) spread += squared_euclidean(points.row(i), mean);
    }
    const double slack = 1e-12 * spread;

    double previous = std::numeric_limits<double>::infinity();
    for (int it = 0; it < options.max_iter; ++it) {
        const double inertia = assign(points, model.centroids, model.labels, cost);
        if (inertia > previous * (1.0 + 1e-12) + slack) {
            throw ClusteringError("k-means: inertia increased during Lloyd iteration " +
                                  std::to_string(it));
        }
        model.inertia_history.push_back(inertia);
        model.iterations = it + 1;
        update_means(points, model.centroids, model.labels, cost);
        if (std::isfinite(previous) &&
            (previous - inertia) <= options.tol * std::max(previous, std::numeric_limits<double>::min())) {
            break;
        }
        previous = inertia;
    }
    model.inertia = assign(points, model.centroids, model.labels, cost);
    std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
    for (const int l : model.labels) ++sizes[static_cast<std::size_t>(l)];
    if (std::find(sizes.begin(), sizes.end(), std::size_t{0}) != sizes.end()) {
        repair_empty(points, model.centroids, model.labels, cost, sizes);
        model.inertia = std::accumulate(cost.begin(), cost.end(), 0.0);
    }
    return model;
}

}  // namespace

ClusterModel kmeans_fit(const Matrix& points, int k, std::uint64_t seed, const KMeansOptions& options) {
    const std::size_t n = points.rows();
    if (k < 1) {
        throw ClusteringError("k-means: k must be at least 1");
    }
    if (n < static_cast<std::size_t>(k)) {
        throw ClusteringError("k-means: " + std::to_string(n) + " points cannot form " +
                              std::to_string(k) + " clusters");
    }
    if (count_distinct_rows(points, static_cast<std::size_t>(k)) < static_cast<std::size_t>(k)) {
        throw ClusteringError("k-means: fewer than " + std::to_string(k) + " distinct points");
    }
    if (options.restarts < 1 || options.max_iter < 1 || !(options.tol >= 0.0)) {
        throw ContractViolation("k-means: invalid options");
    }
    ClusterModel best;
    for (int r = 0; r < options.restarts; ++r) {
        ClusterModel candidate = lloyd(points, k, derive_seed(seed, static_cast<std::uint64_t>(r)), options);
        if (r == 0 || candidate.inertia < best.inertia) {
            best = std::move(candidate);
        }
    }
    best.seed = seed;
    return best;
}

double silhouette(const Matrix& points, std::span<const int> labels) {
    const std::size_t n = points.rows();
    if (labels.size() != n) {
        throw ContractViolation("silhouette: one label per point required");
    }
    std::vector<int> distinct(labels.begin(), labels.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) {
        throw ClusteringError("silhouette needs at least two clusters");
    }
    const std::size_t k = distinct.size();
    std::vector<std::size_t> compact(n);
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
        compact[i] = static_cast<std::size_t>(
            std::lower_bound(distinct.begin(), distinct.end(), labels[i]) - distinct.begin());
        ++sizes[compact[i]];
    }

    // sums[i * k + c] = total distance from i to members of cluster c
    std::vector<double> sums(n * k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto pi = points.row(i);
        double* si = sums.data() + i * k;
        const std::size_t ci = compact[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = euclidean(pi, points.row(j));
            si[compact[j]] += d;
            sums[j * k + ci] += d;
        }
    }

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t own = compact[i];
        if (sizes[own] <= 1) continue;
        const double a = sums[i * k + own] / static_cast<double>(sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c == own) continue;
            b = std::min(b, sums[i * k + c] / static_cast<double>(sizes[c]));
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(n);
}

int pick_best_k(const std::map<int, double>& scores) {
    if (scores.empty()) {
        throw ContractViolation("pick_best_k: no scores");
    }
    int best = scores.begin()->first;
    double best_score = scores.begin()->second;
    for (const auto& [k, s] : scores) {
        if (s > best_score + 1e-12) {
            best = k;
            best_score = s;
        }
    }
    return best;
}

KSelection select_k(const Matrix& points, std::span<const int> k_range, std::uint64_t seed,
                    const KMeansOptions& options) {
    if (k_range.empty()) {
        throw ContractViolation("select_k: empty k range");
    }
    std::vector<int> ks(k_range.begin(), k_range.end());
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    if (ks.front() < 2 || static_cast<std::size_t>(ks.back()) > points.rows() - 1 || points.rows() < 3) {
        throw ContractViolation("select_k: k range must lie within [2, n - 1]");
    }
    KSelection selection;
    std::map<int, ClusterModel> models;
    for (const int k : ks) {
        auto model = kmeans_fit(points, k, seed, options);
        selection.scores[k] = silhouette(points, model.labels);
        models.emplace(k, std::move(model));
    }
    selection.best_k = pick_best_k(selection.scores);
    selection.model = std::move(models.at(selection.best_k));
    return selection;
}

std::string model_to_json(const ClusterModel& model) {
    nlohmann::ordered_json j;
    j["k"] = model.k;
    auto& centroids = j["centroids"] = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < model.centroids.rows(); ++c) {
        const auto row = model.centroids.row(c);
        centroids.push_back(std::vector<double>(row.begin(), row.end()));
    }
    j["seed"] = model.seed;
    j["inertia"] = model.inertia;
    return j.dump(2);
}

}  // namespace latentflow
