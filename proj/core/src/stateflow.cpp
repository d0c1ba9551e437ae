#include "latentflow/stateflow.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>

#include "latentflow/csv.hpp"
#include "latentflow/error.hpp"

namespace latentflow {

namespace {

void check_labels(std::span<const Point2D> points, std::span<const int> labels, int k) {
    if (k < 1) {
        throw ContractViolation("transition matrix needs k >= 1");
    }
    if (points.empty()) {
        throw ContractViolation("transition matrix needs at least one point");
    }
    if (labels.size() != points.size()) {
        throw ContractViolation("one label per point required");
    }
    for (const int l : labels) {
        if (l < 0 || l >= k) {
            throw ContractViolation("label " + std::to_string(l) + " outside [0, " + std::to_string(k) + ")");
        }
    }
}

void normalise_rows(TransitionMatrix& t) {
    const auto k = static_cast<std::size_t>(t.k);
    t.values = Matrix(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto row = t.counts.row(i);
        const double total = std::accumulate(row.begin(), row.end(), 0.0);
        for (std::size_t j = 0; j < k; ++j) {
            t.values(i, j) = total > 0.0 ? row[j] / total : 1.0 / static_cast<double>(k);
        }
    }
}

}  // namespace

TransitionMatrix build_transition_matrix(std::string participant_id, std::span<const Point2D> points,
                                         std::span<const int> labels, int k, double threshold) {
    check_labels(points, labels, k);
    if (!(threshold > 0.0) || !std::isfinite(threshold)) {
        throw ContractViolation("threshold must be positive and finite");
    }
    TransitionMatrix t;
    t.participant_id = std::move(participant_id);
    t.k = k;
    t.threshold = threshold;
    t.counts = Matrix(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
    const double limit = threshold * threshold;
    for (std::size_t a = 0; a < points.size(); ++a) {
        for (std::size_t b = a + 1; b < points.size(); ++b) {
            const double dx = points[a].x - points[b].x;
            const double dy = points[a].y - points[b].y;
            if (dx * dx + dy * dy <= limit) {
                // both orderings (a, b) and (b, a)
                t.counts(static_cast<std::size_t>(labels[a]), static_cast<std::size_t>(labels[b])) += 1.0;
                t.counts(static_cast<std::size_t>(labels[b]), static_cast<std::size_t>(labels[a])) += 1.0;
            }
        }
    }
    normalise_rows(t);
    return t;
}

TransitionMatrix build_temporal_transition_matrix(std::string participant_id,
                                                  std::span<const Point2D> points,
                                                  std::span<const int> labels, int k) {
    check_labels(points, labels, k);
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return points[a].date < points[b].date; });
    TransitionMatrix t;
    t.participant_id = std::move(participant_id);
    t.k = k;
    t.counts = Matrix(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const auto& from = points[order[i]];
        const auto& to = points[order[i + 1]];
        if (days_between(from.date, to.date) == 1) {
            t.counts(static_cast<std::size_t>(labels[order[i]]), static_cast<std::size_t>(labels[order[i + 1]])) += 1.0;
        }
    }
    normalise_rows(t);
    return t;
}

double median_pairwise_distance(std::span<const Point2D> points) {
    if (points.size() < 2) return 1.0;
    std::vector<double> d;
    d.reserve(points.size() * (points.size() - 1) / 2);
    for (std::size_t a = 0; a < points.size(); ++a) {
        for (std::size_t b = a + 1; b < points.size(); ++b) {
            d.push_back(std::hypot(points[a].x - points[b].x, points[a].y - points[b].y));
        }
    }
    std::sort(d.begin(), d.end());
    const std::size_t m = d.size();
    const double median = m % 2 == 1 ? d[m / 2] : 0.5 * (d[m / 2 - 1] + d[m / 2]);
    if (median > 0.0) return median;
    if (d.back() > 0.0) return d.back();
    return 1.0;
}

double StateVector::entropy_bits() const {
    double h = 0.0;
    for (const double v : values) {
        if (v > 0.0) h -= v * std::log2(v);
    }
    return h;
}

StateVector pagerank(const Matrix& transitions, const PageRankOptions& options) {
    const std::size_t k = transitions.rows();
    if (k == 0 || transitions.cols() != k) {
        throw ContractViolation("pagerank needs a non-empty square matrix");
    }
    if (!(options.alpha >= 0.0 && options.alpha <= 1.0) || options.max_iter < 1 || !(options.tol > 0.0)) {
        throw ContractViolation("pagerank: invalid options");
    }
    for (std::size_t i = 0; i < k; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double v = transitions(i, j);
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw ContractViolation("pagerank: matrix has a negative or non-finite entry");
            }
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw ContractViolation("pagerank: row " + std::to_string(i) + " sums to " +
                                    csv::format_number(sum) + ", not 1");
        }
    }

    StateVector out;
    out.alpha = options.alpha;
    const double kd = static_cast<double>(k);
    const double teleport = (1.0 - options.alpha) / kd;
    std::vector<double> p(k, 1.0 / kd), next(k);
    for (int it = 0; it < options.max_iter; ++it) {
        std::fill(next.begin(), next.end(), teleport);
        for (std::size_t i = 0; i < k; ++i) {
            const double w = options.alpha * p[i];
            for (std::size_t j = 0; j < k; ++j) {
                next[j] += w * transitions(i, j);  // (T^T p)_j = sum_i T_ij p_i
            }
        }
        double residual = 0.0;
        for (std::size_t j = 0; j < k; ++j) residual += std::abs(next[j] - p[j]);
        p.swap(next);
        out.residuals.push_back(residual);
        out.iterations = it + 1;
        if (residual < options.tol) {
            out.converged = true;
            break;
        }
    }
    out.values = std::move(p);
    return out;
}

StateVector pagerank(const TransitionMatrix& transitions, const PageRankOptions& options) {
    auto state = pagerank(transitions.values, options);
    state.participant_id = transitions.participant_id;
    return state;
}

Fingerprint fingerprint(std::string participant_id, std::span<const Point2D> points,
                        std::span<const int> labels, int k, std::optional<double> threshold,
                        const PageRankOptions& options, TransitionMode mode) {
    Fingerprint fp;
    if (mode == TransitionMode::temporal) {
        fp.transitions = build_temporal_transition_matrix(std::move(participant_id), points, labels, k);
    } else {
        const double t = threshold ? *threshold : median_pairwise_distance(points);
        fp.transitions = build_transition_matrix(std::move(participant_id), points, labels, k, t);
    }
    fp.state = pagerank(fp.transitions, options);
    return fp;
}

std::vector<Fingerprint> fingerprint_all(std::span<const Point2D> points, std::span<const int> labels,
                                         int k, std::optional<double> threshold,
                                         const PageRankOptions& options, TransitionMode mode) {
    if (labels.size() != points.size()) {
        throw ContractViolation("one label per point required");
    }
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < points.size(); ++i) groups[points[i].participant_id].push_back(i);
    std::vector<Fingerprint> out;
    out.reserve(groups.size());
    for (const auto& [id, idx] : groups) {
        std::vector<Point2D> own;
        std::vector<int> own_labels;
        own.reserve(idx.size());
        own_labels.reserve(idx.size());
        for (const auto i : idx) {
            own.push_back(points[i]);
            own_labels.push_back(labels[i]);
        }
        out.push_back(fingerprint(id, own, own_labels, k, threshold, options, mode));
    }
    return out;
}

void write_fingerprints(std::ostream& out, std::span<const Fingerprint> fingerprints) {
    const int k = fingerprints.empty() ? 0 : fingerprints.front().transitions.k;
    out << "participant_id";
    for (int j = 1; j <= k; ++j) out << ",v" << j;
    out << ",alpha,threshold,converged\n";
    for (const auto& fp : fingerprints) {
        out << csv::escape(fp.state.participant_id);
        for (const double v : fp.state.values) out << ',' << csv::format_number(v);
        out << ',' << csv::format_number(fp.state.alpha) << ','
            << csv::format_number(fp.transitions.threshold) << ','
            << (fp.state.converged ? "true" : "false") << '\n';
    }
}

std::vector<StateVector> read_fingerprints(std::istream& in) {
    std::vector<StateVector> out;
    std::string line;
    if (!std::getline(in, line)) return out;
    const auto header = csv::split(line);
    if (header.size() < 5 || header.front() != "participant_id" || header.back() != "converged") {
        throw DataError("fingerprint file has an unexpected header");
    }
    const std::size_t k = header.size() - 4;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        const auto cells = csv::split(line);
        if (cells.size() != k + 4) {
            throw DataError("fingerprints line " + std::to_string(line_no) + ": wrong column count");
        }
        StateVector s;
        s.participant_id = cells[0];
        for (std::size_t j = 0; j < k; ++j) {
            const auto v = csv::parse_number(cells[j + 1]);
            if (!v) throw DataError("fingerprints line " + std::to_string(line_no) + ": bad value");
            s.values.push_back(*v);
        }
        const auto alpha = csv::parse_number(cells[k + 1]);
        if (!alpha) throw DataError("fingerprints line " + std::to_string(line_no) + ": bad alpha");
        s.alpha = *alpha;
        s.converged = cells[k + 3] == "true";
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<StateVector> read_fingerprints_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open fingerprint file " + path.string());
    }
    return read_fingerprints(in);
}

}  // namespace latentflow
