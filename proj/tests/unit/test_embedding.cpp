#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "latentflow/embedding.hpp"
#include "latentflow/error.hpp"
#include "latentflow/time.hpp"

using namespace latentflow;

namespace {

const Date kDay = *parse_iso_date("2023-08-01");

DayString day(const std::string& id, int offset, const std::string& fill, const std::string& other = "") {
    DayString d{id, kDay + std::chrono::days{offset}, std::vector<std::string>(72, fill)};
    if (!other.empty()) {
        for (int s = 30; s < 40; ++s) d.tokens[s] = other;
    }
    return d;
}

}  // namespace

TEST(HashEmbed, DeterministicAndUnitNorm) {
    const auto d = day("p1", 0, "kitchen", "lounge");
    const auto a = hash_embed(d);
    const auto b = hash_embed(d);
    EXPECT_EQ(a, b);
    ASSERT_EQ(a.vector.size(), 384u);
    double norm = 0.0;
    for (const double v : a.vector) norm += v * v;
    EXPECT_NEAR(norm, 1.0, 1e-12);
    EXPECT_NE(hash_embed(d, 384, 1).vector, a.vector);
    EXPECT_THROW(hash_embed(d, 8), ContractViolation);
}

TEST(HashEmbed, SimilarDaysAreCloser) {
    const auto base = hash_embed(day("p", 0, "kitchen", "lounge"));
    const auto near = hash_embed(day("p", 1, "kitchen", "hallway"));
    const auto far = hash_embed(day("p", 2, "bedroom", "bathroom"));
    EXPECT_GT(cosine_similarity(base.vector, near.vector), cosine_similarity(base.vector, far.vector));
}

TEST(EmbeddingSet, RejectsBadRows) {
    EmbeddingSet set(3);
    set.add({"p", kDay, {1, 2, 3}});
    EXPECT_THROW(set.add({"p", kDay, {1, 2, 3}}), DataError);
    EXPECT_THROW(set.add({"p", kDay + std::chrono::days{1}, {1, 2}}), DataError);
    EXPECT_THROW(set.add({"p", kDay + std::chrono::days{1}, {1, NAN, 2}}), DataError);
    ASSERT_NE(set.find({"p", kDay}), nullptr);
    EXPECT_EQ(set.find({"q", kDay}), nullptr);
}

TEST(EmbeddingSet, TsvRoundTripIsExact) {
    const std::vector<DayString> days = {day("a", 0, "kitchen"), day("a", 1, "lounge", "bed"), day("b", 0, "bed")};
    const auto set = hash_embed_all(days, 64, 3);
    std::ostringstream out;
    write_embeddings(out, set);
    std::istringstream in(out.str());
    EXPECT_EQ(read_embeddings(in), set);
}

TEST(EmbeddingSet, RaggedFileNamesTheLine) {
    std::istringstream in("p\t2023-08-01\t1\t2\np\t2023-08-02\t1\n");
    try {
        read_embeddings(in);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
}

TEST(TripletAccuracy, HandComputed) {
    EmbeddingSet set(2);
    set.add({"p", kDay, {0, 0}});
    set.add({"p", kDay + std::chrono::days{1}, {1, 0}});
    set.add({"q", kDay, {3, 1}});
    set.add({"q", kDay + std::chrono::days{1}, {0.5, 0}});
    TripletSet t;
    const DayKey a{"p", kDay}, p{"p", kDay + std::chrono::days{1}}, far{"q", kDay},
        close{"q", kDay + std::chrono::days{1}};
    t.triplets = {{a, p, far}, {a, p, close}};
    const auto score = triplet_accuracy(set, t, 1.0);
    EXPECT_EQ(score.count, 2u);
    EXPECT_DOUBLE_EQ(score.accuracy, 0.5);
    // losses: max(0, 1 - 4 + 1) = 0 and max(0, 1 - 0.5 + 1) = 1.5
    EXPECT_DOUBLE_EQ(score.mean_loss, 0.75);
    t.triplets.push_back({a, p, {"zz", kDay}});
    EXPECT_THROW(triplet_accuracy(set, t), DataError);
}
