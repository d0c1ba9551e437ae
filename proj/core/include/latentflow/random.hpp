#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>

namespace latentflow {

/// Seeded generator whose outputs are identical on every platform.
///
/// std::mt19937_64 is fully specified by the standard, but the std
/// distributions are not, so every draw is derived here from raw 64-bit words.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();

    /// Uniform integer in [0, n); n must be positive.
    std::size_t index(std::size_t n);

    /// Standard normal (Marsaglia polar method).
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Exponential with the given mean.
    double exponential(double mean);

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

/// Seed for sub-stream `stream` of a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace latentflow
