#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "latentflow/embedding.hpp"
#include "latentflow/error.hpp"
#include "latentflow/matrix.hpp"

namespace latentflow {

/// Optimiser settings for exact t-SNE. All defaults follow the common
/// reference implementation conventions.
struct TsneConfig {
    double perplexity = 30.0;
    int iterations = 1000;
    double learning_rate = 200.0;
    double early_exaggeration = 12.0;
    int exaggeration_iterations = 250;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    int momentum_switch_iteration = 250;
    double min_gain = 0.01;
    double perplexity_tolerance = 1e-5;  // on row entropy, in bits
    std::uint64_t seed = 0;
    /// Record the KL objective every this many iterations (0 = never).
    int kl_every = 0;

    /// Throws ContractViolation for n < 5 or perplexity >= (n - 1) / 3.
    void validate(std::size_t n) const;
};

class TsneError : public Error {
public:
    using Error::Error;
};

/// Symmetrised joint input affinities for n points, stored as the strict
/// upper triangle (i < j), row-major.
struct Affinities {
    std::size_t n = 0;
    std::vector<double> packed;
    std::vector<double> betas;           // per-row precision 1 / (2 sigma^2)
    std::vector<double> entropies_bits;  // achieved Shannon entropy per conditional row

    static std::size_t row_offset(std::size_t n, std::size_t i) {
        return i * n - i * (i + 1) / 2;
    }
    double at(std::size_t i, std::size_t j) const;
    double total() const;  // sum over all ordered pairs; 1 by construction
};

/// Conditional Gaussian affinities calibrated per row to `perplexity`, then
/// symmetrised as P_ij = (p_j|i + p_i|j) / 2n.
Affinities joint_affinities(const Matrix& x, double perplexity, double tolerance = 1e-5);

/// KL(P || Q) of a 2-D layout under the Student-t kernel.
double kl_divergence(const Affinities& p, const Matrix& y);

struct KlSample {
    int iteration = 0;
    double kl = 0.0;
};

struct TsneResult {
    Matrix embedding;  // n x 2
    std::vector<KlSample> kl_trace;
    std::vector<double> entropies_bits;
};

/// Exact O(n^2) t-SNE with a Gaussian(0, 1e-4) initial layout drawn per row
/// index from the seeded generator.
TsneResult tsne_embed(const Matrix& x, const TsneConfig& config);

/// As above but starting from `initial` (n x 2).
TsneResult tsne_embed(const Matrix& x, const TsneConfig& config, Matrix initial);

/// Gaussian(0, 1e-4) initial layout, row i drawn i-th.
Matrix tsne_initial_layout(std::size_t n, std::uint64_t seed);

struct Point2D {
    std::string participant_id;
    Date date;
    double x = 0.0;
    double y = 0.0;

    DayKey key() const { return {participant_id, date}; }
    bool operator==(const Point2D&) const = default;
};

/// Projects every embedding; output keeps input order.
std::vector<Point2D> tsne_fit(const EmbeddingSet& embeddings, const TsneConfig& config);

/// CSV: participant_id,date,x,y.
void write_points(std::ostream& out, std::span<const Point2D> points);
std::vector<Point2D> read_points(std::istream& in);
std::vector<Point2D> read_points_file(const std::filesystem::path& path);

}  // namespace latentflow
