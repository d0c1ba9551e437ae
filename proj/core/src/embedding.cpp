#include "latentflow/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "latentflow/csv.hpp"
#include "latentflow/error.hpp"
#include "latentflow/hash.hpp"

namespace latentflow {

EmbeddingSet::EmbeddingSet(std::size_t dimension) : dimension_(dimension) {
    if (dimension == 0) {
        throw ContractViolation("embedding dimension must be positive");
    }
}

void EmbeddingSet::add(Embedding embedding) {
    const auto label = embedding.participant_id + " " + format_iso_date(embedding.date);
    if (embedding.vector.size() != dimension_) {
        throw DataError("embedding " + label + " has dimension " +
                        std::to_string(embedding.vector.size()) + ", expected " +
                        std::to_string(dimension_));
    }
    if (!std::all_of(embedding.vector.begin(), embedding.vector.end(),
                     [](double v) { return std::isfinite(v); })) {
        throw DataError("embedding " + label + " has a non-finite component");
    }
    auto key = embedding.key();
    if (index_.contains(key)) {
        throw DataError("duplicate embedding for " + label);
    }
    index_.emplace(std::move(key), records_.size());
    records_.push_back(std::move(embedding));
}

const Embedding* EmbeddingSet::find(const DayKey& key) const {
    const auto it = index_.find(key);
    return it == index_.end() ? nullptr : &records_[it->second];
}

Matrix EmbeddingSet::to_matrix() const {
    Matrix m(records_.size(), dimension_);
    for (std::size_t i = 0; i < records_.size(); ++i) {
        std::copy(records_[i].vector.begin(), records_[i].vector.end(), m.row(i).begin());
    }
    return m;
}

// TSV ----------------------------------------------------------------------------

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    for (;;) {
        const auto next = line.find('\t', pos);
        out.push_back(line.substr(pos, next == std::string_view::npos ? next : next - pos));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

}  // namespace

EmbeddingSet read_embeddings(std::istream& in) {
    std::optional<EmbeddingSet> set;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto where = "embeddings line " + std::to_string(line_no) + ": ";
        const auto cols = split_tabs(line);
        if (cols.size() < 3) {
            throw DataError(where + "expected participant_id, date and at least one component");
        }
        const std::size_t dim = cols.size() - 2;
        if (!set) {
            set.emplace(dim);
        } else if (dim != set->dimension()) {
            throw DataError(where + "ragged row with " + std::to_string(dim) +
                            " components, expected " + std::to_string(set->dimension()));
        }
        const auto date = parse_iso_date(cols[1]);
        if (cols[0].empty() || !date) {
            throw DataError(where + "bad participant_id or date");
        }
        Embedding e{std::string(cols[0]), *date, std::vector<double>(dim)};
        for (std::size_t c = 0; c < dim; ++c) {
            const auto v = csv::parse_number(cols[c + 2]);
            if (!v) {
                throw DataError(where + "component " + std::to_string(c + 1) + " is not a number");
            }
            if (!std::isfinite(*v)) {
                throw DataError(where + "component " + std::to_string(c + 1) + " is not finite");
            }
            e.vector[c] = *v;
        }
        try {
            set->add(std::move(e));
        } catch (const DataError& err) {
            throw DataError(where + err.what());
        }
    }
    if (!set) {
        throw DataError("embeddings file is empty");
    }
    return std::move(*set);
}

EmbeddingSet load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open embeddings file " + path.string());
    }
    return read_embeddings(in);
}

void write_embeddings(std::ostream& out, const EmbeddingSet& set) {
    std::string line;
    for (const auto& e : set.records()) {
        line = e.participant_id;
        line += '\t';
        line += format_iso_date(e.date);
        for (const double v : e.vector) {
            line += '\t';
            line += csv::format_number(v);
        }
        line += '\n';
        out << line;
    }
}

void save_embeddings(const std::filesystem::path& path, const EmbeddingSet& set) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    write_embeddings(out, set);
}

// Hash embedding -------------------------------------------------------------------

Embedding hash_embed(const DayString& day, std::size_t dim, std::uint64_t seed) {
    if (dim < 16) {
        throw ContractViolation("hash_embed: dimension must be at least 16");
    }
    std::vector<double> v(dim, 0.0);
    const std::uint64_t basis = fnv1a64("latentflow.hash_embed", splitmix64(seed) ^ kFnvOffsetBasis);
    const auto add = [&](const std::string& feature) {
        const std::uint64_t h = fmix64(fnv1a64(feature, basis));
        const auto bucket = static_cast<std::size_t>(h % dim);
        v[bucket] += (h >> 63) ? -1.0 : 1.0;
    };
    std::string feature;
    for (std::size_t s = 0; s < day.tokens.size(); ++s) {
        feature = "s";
        feature += std::to_string(s);
        feature += '=';
        feature += day.tokens[s];
        add(feature);
        if (s + 1 < day.tokens.size()) {
            feature = "b";
            feature += day.tokens[s];
            feature += '>';
            feature += day.tokens[s + 1];
            add(feature);
        }
    }
    double norm = 0.0;
    for (const double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0) {
        for (double& x : v) x /= norm;
    }
    return {day.participant_id, day.date, std::move(v)};
}

EmbeddingSet hash_embed_all(std::span<const DayString> days, std::size_t dim, std::uint64_t seed) {
    EmbeddingSet set(dim);
    for (const auto& d : days) {
        set.add(hash_embed(d, dim, seed));
    }
    return set;
}

// Triplet scoring ---------------------------------------------------------------------

TripletScore triplet_accuracy(const EmbeddingSet& set, const TripletSet& triplets, double margin) {
    TripletScore score;
    std::size_t correct = 0;
    double loss = 0.0;
    for (std::size_t t = 0; t < triplets.triplets.size(); ++t) {
        const auto& tr = triplets.triplets[t];
        const auto lookup = [&](const DayKey& key, const char* role) -> const Embedding& {
            const Embedding* e = set.find(key);
            if (e == nullptr) {
                throw DataError("triplet " + std::to_string(t) + ": no embedding for " + role + " " +
                                key.participant_id + " " + format_iso_date(key.date));
            }
            return *e;
        };
        const auto& a = lookup(tr.anchor, "anchor");
        const auto& p = lookup(tr.positive, "positive");
        const auto& n = lookup(tr.negative, "negative");
        const double d_ap = l1_distance(a.vector, p.vector);
        const double d_an = l1_distance(a.vector, n.vector);
        if (d_ap < d_an) ++correct;
        loss += std::max(0.0, d_ap - d_an + margin);
    }
    score.count = triplets.triplets.size();
    if (score.count > 0) {
        score.accuracy = static_cast<double>(correct) / static_cast<double>(score.count);
        score.mean_loss = loss / static_cast<double>(score.count);
    }
    return score;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / std::sqrt(na * nb);
}

}  // namespace latentflow
