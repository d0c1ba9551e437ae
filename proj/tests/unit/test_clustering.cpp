#include <gtest/gtest.h>

#include <random>

#include "latentflow/clustering.hpp"
#include "latentflow/error.hpp"
#include "oracles.hpp"

using namespace latentflow;

namespace {

oracle::Blobs blobs2d(std::size_t k, std::size_t per, double sd, std::uint64_t seed) {
    std::vector<std::vector<double>> centres;
    for (std::size_t c = 0; c < k; ++c) {
        const double angle = 2.0 * M_PI * static_cast<double>(c) / static_cast<double>(k);
        centres.push_back({20.0 * std::cos(angle), 20.0 * std::sin(angle)});
    }
    return oracle::gaussian_blobs(centres, per, sd, seed);
}

}  // namespace

TEST(Silhouette, MatchesDirectFormula) {
    std::mt19937_64 gen(1);
    for (const std::size_t n : {10u, 57u, 300u}) {
        for (int trial = 0; trial < 3; ++trial) {
            const auto b = blobs2d(4, n / 4 + 1, 4.0, gen());
            std::vector<int> labels(b.x.rows());
            for (auto& l : labels) l = static_cast<int>(gen() % 4);
            labels[0] = 0;
            labels[1] = 1;
            EXPECT_NEAR(silhouette(b.x, labels), oracle::silhouette(b.x, labels), 1e-9);
        }
    }
}

TEST(Silhouette, SingletonsAndDegenerateInput) {
    Matrix x(3, 1);
    x(1, 0) = 1.0;
    x(2, 0) = 5.0;
    // the singleton cluster contributes 0
    EXPECT_NEAR(silhouette(x, std::vector<int>{0, 0, 1}), oracle::silhouette(x, {0, 0, 1}), 1e-12);
    EXPECT_THROW(silhouette(x, std::vector<int>{0, 0, 0}), ClusteringError);
}

TEST(KMeans, InertiaNeverIncreases) {
    const auto b = blobs2d(5, 40, 6.0, 3);
    const auto m = kmeans_fit(b.x, 5, 11);
    ASSERT_FALSE(m.inertia_history.empty());
    for (std::size_t i = 1; i < m.inertia_history.size(); ++i) {
        EXPECT_LE(m.inertia_history[i], m.inertia_history[i - 1] * (1 + 1e-12));
    }
    EXPECT_EQ(m.labels.size(), b.x.rows());
}

TEST(KMeans, RecoversSeparatedBlobsAndIsDeterministic) {
    const auto b = blobs2d(4, 30, 1.0, 4);
    const auto m = kmeans_fit(b.x, 4, 2);
    EXPECT_DOUBLE_EQ(oracle::adjusted_rand_index(b.labels, m.labels), 1.0);
    const auto again = kmeans_fit(b.x, 4, 2);
    EXPECT_EQ(m.labels, again.labels);
    EXPECT_EQ(m.centroids, again.centroids);
}

TEST(KMeans, TooFewDistinctPoints) {
    Matrix x(6, 2, 1.0);
    x(0, 0) = 2.0;
    EXPECT_THROW(kmeans_fit(x, 3, 0), ClusteringError);
    EXPECT_THROW(kmeans_fit(Matrix(2, 2), 3, 0), ClusteringError);
}

TEST(SelectK, FindsTheBlobCount) {
    for (const std::size_t k : {3u, 5u}) {
        const auto b = blobs2d(k, 40, 1.0, 10 + k);
        const std::vector<int> range = {2, 3, 4, 5, 6, 7};
        const auto sel = select_k(b.x, range, 1);
        EXPECT_EQ(sel.best_k, static_cast<int>(k));
        EXPECT_EQ(sel.scores.size(), range.size());
        EXPECT_EQ(sel.model.k, sel.best_k);
    }
}

TEST(SelectK, TiesGoToTheSmallerK) {
    EXPECT_EQ(pick_best_k({{4, 0.5}, {5, 0.5}, {6, 0.4}}), 4);
    EXPECT_EQ(pick_best_k({{4, 0.5}, {5, 0.5 + 1e-14}}), 4);
    EXPECT_EQ(pick_best_k({{4, 0.5}, {5, 0.6}}), 5);
}

TEST(SelectK, RangeMustFitTheData) {
    const auto b = blobs2d(2, 3, 1.0, 1);
    const std::vector<int> too_big = {2, 6};
    EXPECT_THROW(select_k(b.x, too_big, 0), ContractViolation);
    const std::vector<int> too_small = {1, 2};
    EXPECT_THROW(select_k(b.x, too_small, 0), ContractViolation);
}
