#include "latentflow/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "latentflow/csv.hpp"
#include "latentflow/random.hpp"

namespace latentflow {

void TsneConfig::validate(std::size_t n) const {
    if (n < 5) {
        throw ContractViolation("t-SNE needs at least 5 points, got " + std::to_string(n));
    }
    if (!(perplexity >= 1.0) || !(perplexity < (static_cast<double>(n) - 1.0) / 3.0)) {
        throw ContractViolation("perplexity " + csv::format_number(perplexity) +
                                " must be in [1, (n - 1) / 3) for n = " + std::to_string(n));
    }
    if (iterations < 0 || !(learning_rate > 0.0) || !(early_exaggeration >= 1.0) ||
        exaggeration_iterations < 0 || momentum_switch_iteration < 0 || !(min_gain > 0.0) ||
        !(perplexity_tolerance > 0.0)) {
        throw ContractViolation("invalid t-SNE optimiser settings");
    }
}

double Affinities::at(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    if (j < i) std::swap(i, j);
    return packed[row_offset(n, i) + (j - i - 1)];
}

double Affinities::total() const {
    double sum = 0.0;
    for (const double v : packed) sum += v;
    return 2.0 * sum;
}

namespace {

constexpr double kLn2 = 0.69314718055994530942;

struct RowFit {
    double beta = 1.0;
    double entropy_bits = 0.0;
};

// Fills `p` with the conditional distribution exp(-beta d_j) / Z whose
// entropy matches log(perplexity). Safeguarded Newton on beta, falling back
// to bisection; dH/dbeta = -beta Var_p(d).
RowFit calibrate_row(std::span<const double> d, double perplexity, double tol_bits,
                     std::span<double> p) {
    const double dmin = *std::min_element(d.begin(), d.end());
    double mean_shift = 0.0;
    for (const double v : d) mean_shift += v - dmin;
    mean_shift /= static_cast<double>(d.size());

    const double target = std::log(perplexity);
    double entropy = 0.0;
    double variance = 0.0;
    const auto evaluate = [&](double beta) {
        double z = 0.0, s1 = 0.0, s2 = 0.0;
        for (std::size_t j = 0; j < d.size(); ++j) {
            const double shifted = d[j] - dmin;
            const double e = beta * shifted;
            const double w = e > 745.0 ? 0.0 : std::exp(-e);
            p[j] = w;
            z += w;
            s1 += w * shifted;
            s2 += w * shifted * shifted;
        }
        const double mean = s1 / z;
        variance = std::max(0.0, s2 / z - mean * mean);
        entropy = std::log(z) + beta * mean;
        for (std::size_t j = 0; j < d.size(); ++j) p[j] /= z;
    };

    double beta = mean_shift > 0.0 ? 1.0 / mean_shift : 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double best_beta = beta;
    double best_gap = std::numeric_limits<double>::infinity();
    for (int step = 0; step < 200; ++step) {
        evaluate(beta);
        const double diff = entropy - target;
        if (std::abs(diff) < best_gap) {
            best_gap = std::abs(diff);
            best_beta = beta;
        }
        if (std::abs(diff) / kLn2 < tol_bits) {
            return {beta, entropy / kLn2};
        }
        if (diff > 0.0) {
            lo = beta;
        } else {
            hi = beta;
        }
        const double slope = -beta * variance;
        const double newton = slope < 0.0 ? beta - diff / slope : std::numeric_limits<double>::quiet_NaN();
        if (std::isfinite(newton) && newton > lo && newton < hi) {
            beta = newton;
        } else if (std::isinf(hi)) {
            beta = beta * 2.0;
        } else {
            beta = 0.5 * (lo + hi);
        }
    }
    evaluate(best_beta);
    return {best_beta, entropy / kLn2};
}

}  // namespace

Affinities joint_affinities(const Matrix& x, double perplexity, double tolerance) {
    const std::size_t n = x.rows();
    Affinities out;
    out.n = n;
    if (n < 2) {
        throw ContractViolation("affinities need at least 2 points");
    }
    const std::size_t pairs = n * (n - 1) / 2;

    std::vector<double> dist(pairs);
    for (std::size_t i = 0; i < n; ++i) {
        const auto xi = x.row(i);
        double* row = dist.data() + Affinities::row_offset(n, i);
        for (std::size_t j = i + 1; j < n; ++j) {
            row[j - i - 1] = squared_euclidean(xi, x.row(j));
        }
    }

    out.packed.assign(pairs, 0.0);
    out.betas.resize(n);
    out.entropies_bits.resize(n);
    std::vector<double> d(n - 1), p(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        // gather row i, skipping the diagonal
        for (std::size_t j = 0; j < i; ++j) {
            d[j] = dist[Affinities::row_offset(n, j) + (i - j - 1)];
        }
        const std::size_t off = Affinities::row_offset(n, i);
        for (std::size_t j = i + 1; j < n; ++j) {
            d[j - 1] = dist[off + (j - i - 1)];
        }
        const RowFit fit = calibrate_row(d, perplexity, tolerance, p);
        out.betas[i] = fit.beta;
        out.entropies_bits[i] = fit.entropy_bits;
        for (std::size_t j = 0; j < i; ++j) {
            out.packed[Affinities::row_offset(n, j) + (i - j - 1)] += p[j];
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            out.packed[off + (j - i - 1)] += p[j - 1];
        }
    }
    const double scale = 1.0 / (2.0 * static_cast<double>(n));
    for (double& v : out.packed) v *= scale;
    return out;
}

double kl_divergence(const Affinities& p, const Matrix& y) {
    const std::size_t n = p.n;
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = y(i, 0) - y(j, 0);
            const double dy = y(i, 1) - y(j, 1);
            z += 1.0 / (1.0 + dx * dx + dy * dy);
        }
    }
    z *= 2.0;
    double kl = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = p.packed.data() + Affinities::row_offset(n, i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double pij = row[j - i - 1];
            if (pij <= 0.0) continue;
            const double dx = y(i, 0) - y(j, 0);
            const double dy = y(i, 1) - y(j, 1);
            const double q = 1.0 / ((1.0 + dx * dx + dy * dy) * z);
            kl += pij * std::log(pij / std::max(q, std::numeric_limits<double>::min()));
        }
    }
    return 2.0 * kl;
}

Matrix tsne_initial_layout(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Matrix y(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        y(i, 0) = rng.normal(0.0, 1e-4);
        y(i, 1) = rng.normal(0.0, 1e-4);
    }
    return y;
}

TsneResult tsne_embed(const Matrix& x, const TsneConfig& config) {
    return tsne_embed(x, config, tsne_initial_layout(x.rows(), config.seed));
}

TsneResult tsne_embed(const Matrix& x, const TsneConfig& config, Matrix initial) {
    const std::size_t n = x.rows();
    config.validate(n);
    if (initial.rows() != n || initial.cols() != 2) {
        throw ContractViolation("initial layout must be n x 2");
    }
    const Affinities p = joint_affinities(x, config.perplexity, config.perplexity_tolerance);

    // Structure-of-arrays layout keeps the pair loop vectorisable.
    std::vector<double> px(n), py(n);
    for (std::size_t i = 0; i < n; ++i) {
        px[i] = initial(i, 0);
        py[i] = initial(i, 1);
    }
    std::vector<double> attr_x(n), attr_y(n), rep_x(n), rep_y(n);
    std::vector<double> vel_x(n, 0.0), vel_y(n, 0.0);
    std::vector<double> gain_x(n, 1.0), gain_y(n, 1.0);

    TsneResult result;
    const auto layout = [&] {
        Matrix y(n, 2);
        for (std::size_t i = 0; i < n; ++i) {
            y(i, 0) = px[i];
            y(i, 1) = py[i];
        }
        return y;
    };

    for (int iter = 0; iter < config.iterations; ++iter) {
        const double exaggeration = iter < config.exaggeration_iterations ? config.early_exaggeration : 1.0;
        const double momentum =
            iter < config.momentum_switch_iteration ? config.initial_momentum : config.final_momentum;

        std::fill(attr_x.begin(), attr_x.end(), 0.0);
        std::fill(attr_y.begin(), attr_y.end(), 0.0);
        std::fill(rep_x.begin(), rep_x.end(), 0.0);
        std::fill(rep_y.begin(), rep_y.end(), 0.0);
        double z = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double xi = px[i];
            const double yi = py[i];
            const double* prow = p.packed.data() + Affinities::row_offset(n, i);
            double ax = 0.0, ay = 0.0, rx = 0.0, ry = 0.0, zi = 0.0;
#pragma omp simd reduction(+ : ax, ay, rx, ry, zi)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double dx = xi - px[j];
                const double dy = yi - py[j];
                const double q = 1.0 / (1.0 + dx * dx + dy * dy);
                const double wa = prow[j - i - 1] * q;
                const double wr = q * q;
                zi += q;
                ax += wa * dx;
                ay += wa * dy;
                rx += wr * dx;
                ry += wr * dy;
                attr_x[j] -= wa * dx;
                attr_y[j] -= wa * dy;
                rep_x[j] -= wr * dx;
                rep_y[j] -= wr * dy;
            }
            attr_x[i] += ax;
            attr_y[i] += ay;
            rep_x[i] += rx;
            rep_y[i] += ry;
            z += zi;
        }
        z *= 2.0;
        if (!std::isfinite(z) || !(z > 0.0)) {
            throw TsneError("t-SNE produced a non-finite normaliser at iteration " + std::to_string(iter));
        }

        double mean_x = 0.0, mean_y = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double gx = 4.0 * (exaggeration * attr_x[i] - rep_x[i] / z);
            const double gy = 4.0 * (exaggeration * attr_y[i] - rep_y[i] / z);
            if (!std::isfinite(gx) || !std::isfinite(gy)) {
                throw TsneError("t-SNE gradient became non-finite at iteration " + std::to_string(iter));
            }
            gain_x[i] = (gx > 0.0) != (vel_x[i] > 0.0) ? gain_x[i] + 0.2 : gain_x[i] * 0.8;
            gain_y[i] = (gy > 0.0) != (vel_y[i] > 0.0) ? gain_y[i] + 0.2 : gain_y[i] * 0.8;
            gain_x[i] = std::max(gain_x[i], config.min_gain);
            gain_y[i] = std::max(gain_y[i], config.min_gain);
            vel_x[i] = momentum * vel_x[i] - config.learning_rate * gain_x[i] * gx;
            vel_y[i] = momentum * vel_y[i] - config.learning_rate * gain_y[i] * gy;
            px[i] += vel_x[i];
            py[i] += vel_y[i];
            mean_x += px[i];
            mean_y += py[i];
        }
        mean_x /= static_cast<double>(n);
        mean_y /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            px[i] -= mean_x;
            py[i] -= mean_y;
        }

        if (config.kl_every > 0 && ((iter + 1) % config.kl_every == 0 || iter + 1 == config.iterations)) {
            result.kl_trace.push_back({iter + 1, kl_divergence(p, layout())});
        }
    }

    result.embedding = layout();
    result.entropies_bits = p.entropies_bits;
    return result;
}

std::vector<Point2D> tsne_fit(const EmbeddingSet& embeddings, const TsneConfig& config) {
    const auto result = tsne_embed(embeddings.to_matrix(), config);
    std::vector<Point2D> points;
    points.reserve(embeddings.size());
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
        points.push_back({embeddings[i].participant_id, embeddings[i].date, result.embedding(i, 0),
                          result.embedding(i, 1)});
    }
    return points;
}

void write_points(std::ostream& out, std::span<const Point2D> points) {
    out << "participant_id,date,x,y\n";
    for (const auto& p : points) {
        out << csv::escape(p.participant_id) << ',' << format_iso_date(p.date) << ','
            << csv::format_number(p.x) << ',' << csv::format_number(p.y) << '\n';
    }
}

std::vector<Point2D> read_points(std::istream& in) {
    std::vector<Point2D> points;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) return points;
    ++line_no;
    if (csv::trim(line) != "participant_id,date,x,y") {
        throw DataError("points file must start with header participant_id,date,x,y");
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        const auto cells = csv::split(line);
        const auto bad = [&] { return DataError("points line " + std::to_string(line_no) + " is malformed"); };
        if (cells.size() != 4) throw bad();
        const auto date = parse_iso_date(cells[1]);
        const double x = csv::parse_number(cells[2]).value_or(std::nan(""));
        const double y = csv::parse_number(cells[3]).value_or(std::nan(""));
        if (!date || !std::isfinite(x) || !std::isfinite(y)) throw bad();
        points.push_back({cells[0], *date, x, y});
    }
    return points;
}

std::vector<Point2D> read_points_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open points file " + path.string());
    }
    return read_points(in);
}

}  // namespace latentflow
