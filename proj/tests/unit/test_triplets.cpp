#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "latentflow/error.hpp"
#include "latentflow/time.hpp"
#include "latentflow/triplets.hpp"
#include "oracles.hpp"

using namespace latentflow;

namespace {

const Date kDay = *parse_iso_date("2023-08-01");

struct Fixture {
    std::vector<DayString> days;
    std::vector<int> labels;
};

Fixture random_fixture(int participants, int days_each, int k, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    Fixture f;
    for (int p = 0; p < participants; ++p) {
        for (int d = 0; d < days_each; ++d) {
            if (gen() % 7 == 0) continue;  // gaps
            f.days.push_back({"p" + std::to_string(p), kDay + std::chrono::days{d}, std::vector<std::string>(72, "nowhere")});
            f.labels.push_back(static_cast<int>(gen() % static_cast<unsigned>(k)));
        }
    }
    return f;
}

std::string serialise(const TripletSet& t) {
    std::ostringstream out;
    write_triplets(out, t);
    return out.str();
}

}  // namespace

TEST(SelectTriplets, EveryTripletPassesIndependentRecheck) {
    const auto f = random_fixture(6, 120, 3, 1);
    const auto set = select_triplets(f.days, f.labels, 5000, 30, 9);
    ASSERT_EQ(set.triplets.size(), 5000u);
    for (const auto& t : set.triplets) {
        const auto check = oracle::check_triplet(t, f.days, f.labels, 30);
        ASSERT_TRUE(check.positive_ok && check.negative_ok);
    }
}

TEST(SelectTriplets, SeedDeterminesOutput) {
    const auto f = random_fixture(4, 60, 2, 2);
    EXPECT_EQ(serialise(select_triplets(f.days, f.labels, 500, 30, 5)),
              serialise(select_triplets(f.days, f.labels, 500, 30, 5)));
    EXPECT_NE(serialise(select_triplets(f.days, f.labels, 500, 30, 5)),
              serialise(select_triplets(f.days, f.labels, 500, 30, 6)));
}

TEST(SelectTriplets, WindowIsRespectedForSmallWindows) {
    const auto f = random_fixture(3, 90, 2, 3);
    const auto set = select_triplets(f.days, f.labels, 2000, 2, 1);
    for (const auto& t : set.triplets) {
        ASSERT_LE(std::abs((t.anchor.date - t.positive.date).count()), 2);
        ASSERT_TRUE(oracle::check_triplet(t, f.days, f.labels, 2).negative_ok);
    }
}

TEST(SelectTriplets, NoPositiveAnywhereThrows) {
    Fixture f;
    for (int p = 0; p < 5; ++p) {
        f.days.push_back({"p" + std::to_string(p), kDay, std::vector<std::string>(72, "nowhere")});
        f.labels.push_back(0);
    }
    EXPECT_THROW(select_triplets(f.days, f.labels, 10, 30, 0), TripletExhaustedError);
    EXPECT_THROW(select_triplets(f.days, std::vector<int>{0}, 10, 30, 0), ContractViolation);
}

TEST(SelectTriplets, JsonlRoundTrip) {
    const auto f = random_fixture(3, 40, 2, 4);
    const auto set = select_triplets(f.days, f.labels, 50, 30, 3);
    std::istringstream in(serialise(set));
    EXPECT_EQ(read_triplets(in), set);
    std::istringstream truncated(serialise(set).substr(0, 200));
    EXPECT_THROW(read_triplets(truncated), DataError);
}

TEST(OneHot, VocabularyAndRows) {
    std::vector<DayString> days = {{"p", kDay, std::vector<std::string>(72, "kitchen")},
                                   {"p", kDay + std::chrono::days{1}, std::vector<std::string>(72, "nowhere")}};
    days[1].tokens[5] = "bed";
    const auto enc = one_hot_encode(days);
    EXPECT_EQ(enc.vocabulary, (std::vector<std::string>{"nowhere", "bed", "kitchen"}));
    ASSERT_EQ(enc.rows.rows(), 2u);
    ASSERT_EQ(enc.rows.cols(), 72u * 3u);
    for (std::size_t r = 0; r < 2; ++r) {
        double sum = 0.0;
        for (const double v : enc.rows.row(r)) sum += v;
        EXPECT_EQ(sum, 72.0);
    }
    EXPECT_EQ(enc.rows(1, 5 * 3 + 1), 1.0);
}
