#include <gtest/gtest.h>

#include <set>

#include "latentflow/csv.hpp"
#include "latentflow/error.hpp"
#include "latentflow/hash.hpp"
#include "latentflow/random.hpp"
#include "latentflow/time.hpp"

using namespace latentflow;
using namespace std::chrono;

TEST(Time, ParsesUtcAndOffsets) {
    const auto z = parse_rfc3339("2023-08-01T09:00:00Z");
    ASSERT_TRUE(z);
    EXPECT_EQ(format_rfc3339(*z), "2023-08-01T09:00:00Z");
    const auto plus = parse_rfc3339("2023-08-01T10:30:00+01:30");
    ASSERT_TRUE(plus);
    EXPECT_EQ(*plus, *z);
    const auto minus = parse_rfc3339("2023-08-01T04:00:00-05:00");
    ASSERT_TRUE(minus);
    EXPECT_EQ(*minus, *z);
}

TEST(Time, RejectsMalformedTimestamps) {
    for (const char* bad : {"", "2023-08-01", "2023-08-01T09:00:00", "2023-13-01T00:00:00Z",
                            "2023-02-30T00:00:00Z", "2023-08-01T24:00:00Z", "2023-08-01T09:00:00.5Z",
                            "2023-08-01 09:00:00Z", "2023-08-01T09:00:00+2:00"}) {
        EXPECT_FALSE(parse_rfc3339(bad)) << bad;
    }
}

TEST(Time, LocalDateHonoursOffset) {
    const auto ts = *parse_rfc3339("2023-08-01T23:30:00Z");
    EXPECT_EQ(format_iso_date(local_date(ts, minutes{0})), "2023-08-01");
    EXPECT_EQ(format_iso_date(local_date(ts, minutes{60})), "2023-08-02");
    EXPECT_EQ(seconds_into_local_day(ts, minutes{60}), 30 * 60);
    EXPECT_EQ(format_iso_date(local_date(*parse_rfc3339("2023-08-01T00:30:00Z"), minutes{-60})), "2023-07-31");
}

TEST(Time, DaysBetween) {
    EXPECT_EQ(days_between(*parse_iso_date("2022-08-01"), *parse_iso_date("2024-01-30")), 547);
    EXPECT_FALSE(parse_iso_date("2023-02-29"));
    EXPECT_TRUE(parse_iso_date("2024-02-29"));
}

TEST(Csv, SplitHandlesQuotes) {
    EXPECT_EQ(csv::split("a,b,,c"), (std::vector<std::string>{"a", "b", "", "c"}));
    EXPECT_EQ(csv::split("\"x, y\",\"he said \"\"hi\"\"\",z"),
              (std::vector<std::string>{"x, y", "he said \"hi\"", "z"}));
    EXPECT_THROW(csv::split("\"open"), DataError);
    EXPECT_EQ(csv::split(csv::escape("a,\"b\"")), (std::vector<std::string>{"a,\"b\""}));
}

TEST(Csv, NumbersRoundTrip) {
    for (const double v : {0.0, -1.5, 1e-300, 0.1, 123456789.125, 2.0 / 3.0}) {
        EXPECT_EQ(*csv::parse_number(csv::format_number(v)), v);
    }
    EXPECT_FALSE(csv::parse_number("1.5x"));
    EXPECT_FALSE(csv::parse_number(""));
    EXPECT_EQ(*csv::parse_integer("42"), 42);
    EXPECT_FALSE(csv::parse_integer("4.2"));
}

TEST(Hash, KnownFnvVectors) {
    // Published FNV-1a 64 test vectors.
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
    EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Random, SameSeedSameStream) {
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        EXPECT_EQ(x, b.next());
        differs |= x != c.next();
    }
    EXPECT_TRUE(differs);
}

TEST(Random, DrawsStayInRangeAndLookRight) {
    Rng rng(7);
    const int n = 200000;
    double sum_u = 0, sum_n = 0, sum_n2 = 0, sum_e = 0;
    std::vector<int> counts(5, 0);
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum_u += u;
        const double z = rng.normal();
        sum_n += z;
        sum_n2 += z * z;
        const double e = rng.exponential(3.0);
        ASSERT_GE(e, 0.0);
        sum_e += e;
        ++counts[rng.index(5)];
    }
    EXPECT_NEAR(sum_u / n, 0.5, 0.005);
    EXPECT_NEAR(sum_n / n, 0.0, 0.01);
    EXPECT_NEAR(sum_n2 / n, 1.0, 0.02);
    EXPECT_NEAR(sum_e / n, 3.0, 0.05);
    for (const int c : counts) EXPECT_NEAR(c / static_cast<double>(n), 0.2, 0.005);
}

TEST(Random, DerivedSeedsAreDistinct) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(derive_seed(123, s));
    EXPECT_EQ(seen.size(), 1000u);
    EXPECT_EQ(derive_seed(1, 2), derive_seed(1, 2));
}
