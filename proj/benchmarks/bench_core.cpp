#include <benchmark/benchmark.h>

#include <random>

#include "latentflow/clustering.hpp"
#include "latentflow/embedding.hpp"
#include "latentflow/preprocess.hpp"
#include "latentflow/stateflow.hpp"
#include "latentflow/synthgen.hpp"
#include "latentflow/tsne.hpp"

using namespace latentflow;

namespace {

Matrix gaussian(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    Matrix x(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) x(i, j) = z(gen) + (i % 4 == j % 4 ? 5.0 : 0.0);
    }
    return x;
}

const std::vector<DayString>& sample_days() {
    static const auto days = [] {
        const auto arch = reference_archetypes();
        GenerateOptions o;
        o.participants_per_archetype = 2;
        o.days = 30;
        return window_cohort(generate_cohort(arch, o).cohort);
    }();
    return days;
}

}  // namespace

static void BM_TsneExact(benchmark::State& state) {
    const auto x = gaussian(static_cast<std::size_t>(state.range(0)), 32, 1);
    TsneConfig cfg;
    cfg.iterations = 100;
    for (auto _ : state) benchmark::DoNotOptimize(tsne_embed(x, cfg));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TsneExact)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond)->Complexity();

static void BM_JointAffinities(benchmark::State& state) {
    const auto x = gaussian(static_cast<std::size_t>(state.range(0)), 384, 2);
    for (auto _ : state) benchmark::DoNotOptimize(joint_affinities(x, 30.0));
}
BENCHMARK(BM_JointAffinities)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_PageRank(benchmark::State& state) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto k = static_cast<std::size_t>(state.range(0));
    Matrix t(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += t(i, j) = u(gen);
        for (std::size_t j = 0; j < k; ++j) t(i, j) /= s;
    }
    for (auto _ : state) benchmark::DoNotOptimize(pagerank(t));
}
BENCHMARK(BM_PageRank)->Arg(5)->Arg(50);

static void BM_KMeans(benchmark::State& state) {
    const auto x = gaussian(static_cast<std::size_t>(state.range(0)), 2, 4);
    for (auto _ : state) benchmark::DoNotOptimize(kmeans_fit(x, 5, 0));
}
BENCHMARK(BM_KMeans)->Arg(1000)->Arg(9000)->Unit(benchmark::kMillisecond);

static void BM_Silhouette(benchmark::State& state) {
    const auto x = gaussian(static_cast<std::size_t>(state.range(0)), 2, 5);
    const auto labels = kmeans_fit(x, 5, 0).labels;
    for (auto _ : state) benchmark::DoNotOptimize(silhouette(x, labels));
}
BENCHMARK(BM_Silhouette)->Arg(1000)->Arg(9000)->Unit(benchmark::kMillisecond);

static void BM_HashEmbed(benchmark::State& state) {
    const auto& days = sample_days();
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(hash_embed(days[i++ % days.size()]));
}
BENCHMARK(BM_HashEmbed);

static void BM_WindowDay(benchmark::State& state) {
    const Date day = Date{std::chrono::year{2023} / 9 / 1};
    std::mt19937_64 gen(6);
    std::vector<EventRecord> events(static_cast<std::size_t>(state.range(0)));
    for (auto& e : events) {
        e.participant_id = "p";
        e.timestamp = Timestamp{day} + std::chrono::seconds{static_cast<long>(gen() % 86400)};
        e.kind = EventKind::location_entry;
        e.location = gen() % 2 ? "kitchen" : "lounge";
    }
    std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    for (auto _ : state) benchmark::DoNotOptimize(window_day("p", day, events));
}
BENCHMARK(BM_WindowDay)->Arg(120)->Arg(5000);
BENCHMARK_MAIN();
