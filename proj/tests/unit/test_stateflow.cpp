#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <sstream>

#include "latentflow/error.hpp"
#include "latentflow/stateflow.hpp"
#include "latentflow/time.hpp"
#include "oracles.hpp"

using namespace latentflow;

namespace {

const Date kDay = *parse_iso_date("2023-08-01");

Matrix random_stochastic(std::size_t k, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix t(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += t(i, j) = u(gen);
        for (std::size_t j = 0; j < k; ++j) t(i, j) /= s;
    }
    return t;
}

struct Cloud {
    std::vector<Point2D> points;
    std::vector<int> labels;
};

Cloud two_cluster_cloud(std::size_t n, std::mt19937_64& gen) {
    std::normal_distribution<double> noise(0.0, 1.0);
    Cloud c;
    for (std::size_t i = 0; i < n; ++i) {
        const int label = static_cast<int>(i % 2);
        c.points.push_back({"p", kDay + std::chrono::days{static_cast<long>(i)}, 3.0 * label + noise(gen), noise(gen)});
        c.labels.push_back(label);
    }
    return c;
}

}  // namespace

TEST(TransitionMatrix, CountsMatchExhaustivePairScan) {
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 20; ++trial) {
        const auto c = two_cluster_cloud(10 + gen() % 41, gen);
        const double threshold = 0.5 + 3.0 * std::uniform_real_distribution<double>(0, 1)(gen);
        const auto t = build_transition_matrix("p", c.points, c.labels, 2, threshold);
        EXPECT_EQ(t.counts, oracle::proximity_counts(c.points, c.labels, 2, threshold));
        for (std::size_t i = 0; i < 2; ++i) {
            const auto row = t.values.row(i);
            EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-12);
        }
    }
}

TEST(TransitionMatrix, EmptyRowsBecomeUniform) {
    const std::vector<Point2D> pts = {{"p", kDay, 0, 0}, {"p", kDay, 100, 0}};
    const auto t = build_transition_matrix("p", pts, std::vector<int>{0, 0}, 3, 1.0);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(t.values(i, j), 1.0 / 3.0);
    }
    EXPECT_THROW(build_transition_matrix("p", pts, std::vector<int>{0, 3}, 3, 1.0), ContractViolation);
    EXPECT_THROW(build_transition_matrix("p", pts, std::vector<int>{0, 0}, 3, 0.0), ContractViolation);
}

TEST(TransitionMatrix, TemporalModeCountsConsecutiveDays) {
    const std::vector<Point2D> pts = {{"p", kDay + std::chrono::days{2}, 0, 0},
                                      {"p", kDay, 0, 0},
                                      {"p", kDay + std::chrono::days{1}, 0, 0},
                                      {"p", kDay + std::chrono::days{5}, 0, 0}};
    const auto t = build_temporal_transition_matrix("p", pts, std::vector<int>{1, 0, 1, 0}, 2);
    // day0 (0) -> day1 (1) -> day2 (1); day5 is not consecutive
    EXPECT_EQ(t.counts(0, 1), 1.0);
    EXPECT_EQ(t.counts(1, 1), 1.0);
    EXPECT_EQ(t.counts(1, 0), 0.0);
    EXPECT_EQ(t.counts(0, 0), 0.0);
}

TEST(MedianThreshold, OddEvenAndDegenerate) {
    const std::vector<Point2D> three = {{"p", kDay, 0, 0}, {"p", kDay, 3, 0}, {"p", kDay, 0, 4}};
    EXPECT_DOUBLE_EQ(median_pairwise_distance(three), 4.0);  // {3, 4, 5}
    const std::vector<Point2D> same = {{"p", kDay, 1, 1}, {"p", kDay, 1, 1}};
    EXPECT_DOUBLE_EQ(median_pairwise_distance(same), 1.0);
    // three zeros and three 2s: median 1
    const std::vector<Point2D> half_same = {{"p", kDay, 0, 0}, {"p", kDay, 0, 0}, {"p", kDay, 0, 0}, {"p", kDay, 2, 0}};
    EXPECT_DOUBLE_EQ(median_pairwise_distance(half_same), 1.0);
    // six zeros and four 2s: median 0 falls back to the largest distance
    auto mostly_same = half_same;
    mostly_same.insert(mostly_same.begin(), {"p", kDay, 0, 0});
    EXPECT_DOUBLE_EQ(median_pairwise_distance(mostly_same), 2.0);
}

TEST(PageRank, MatchesDenseSolve) {
    std::mt19937_64 gen(2);
    for (int trial = 0; trial < 100; ++trial) {
        const auto t = random_stochastic(5, gen);
        const auto s = pagerank(t);
        const auto ref = oracle::pagerank_dense(t, 0.85);
        ASSERT_TRUE(s.converged);
        for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(s.values[i], ref[i], 1e-8);
        EXPECT_NEAR(std::accumulate(s.values.begin(), s.values.end(), 0.0), 1.0, 1e-9);
    }
}

TEST(PageRank, UniformMatrixGivesUniformVector) {
    const Matrix t(5, 5, 0.2);
    const auto s = pagerank(t);
    for (const double v : s.values) EXPECT_NEAR(v, 0.2, 1e-10);
    EXPECT_NEAR(s.entropy_bits(), std::log2(5.0), 1e-9);
}

TEST(PageRank, ResidualsShrinkAndInputIsChecked) {
    std::mt19937_64 gen(3);
    const auto s = pagerank(random_stochastic(6, gen));
    for (std::size_t i = 1; i < s.residuals.size(); ++i) EXPECT_LE(s.residuals[i], s.residuals[i - 1] + 1e-15);
    Matrix bad(2, 2, 0.5);
    bad(0, 0) = 0.6;
    EXPECT_THROW(pagerank(bad), ContractViolation);
    PageRankOptions opts;
    opts.alpha = 1.5;
    EXPECT_THROW(pagerank(Matrix(2, 2, 0.5), opts), ContractViolation);
}

TEST(Fingerprint, GroupsByParticipantAndRoundTrips) {
    std::mt19937_64 gen(4);
    std::vector<Point2D> pts;
    std::vector<int> labels;
    for (const char* id : {"b", "a", "c"}) {
        auto c = two_cluster_cloud(30, gen);
        for (auto& p : c.points) p.participant_id = id;
        pts.insert(pts.end(), c.points.begin(), c.points.end());
        labels.insert(labels.end(), c.labels.begin(), c.labels.end());
    }
    const auto fps = fingerprint_all(pts, labels, 2, std::nullopt);
    ASSERT_EQ(fps.size(), 3u);
    EXPECT_EQ(fps[0].state.participant_id, "a");
    for (const auto& fp : fps) EXPECT_EQ(fp.state.values.size(), 2u);
    std::ostringstream out;
    write_fingerprints(out, fps);
    EXPECT_EQ(out.str().substr(0, 40), "participant_id,v1,v2,alpha,threshold,con");
    std::istringstream in(out.str());
    const auto back = read_fingerprints(in);
    ASSERT_EQ(back.size(), 3u);
    EXPECT_EQ(back[1].values, fps[1].state.values);
}
