#include "stages.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "latentflow/clustering.hpp"
#include "latentflow/cohort.hpp"
#include "latentflow/csv.hpp"
#include "latentflow/data_model.hpp"
#include "latentflow/embedding.hpp"
#include "latentflow/hash.hpp"
#include "latentflow/preprocess.hpp"
#include "latentflow/random.hpp"
#include "latentflow/stateflow.hpp"
#include "latentflow/synthgen.hpp"
#include "latentflow/triplets.hpp"
#include "latentflow/tsne.hpp"
#include "svg.hpp"

namespace latentflow::pipeline {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr std::string_view kToolVersion = "0.1.0";

// Per-stage random streams derived from the master seed.
enum Stream : std::uint64_t { synth_stream = 1, triplet_stream = 2, tsne_stream = 3, cluster_stream = 4,
                              cohort_stream = 5, embed_stream = 6 };

// Artifact file names inside out_dir.
constexpr const char* kEvents = "events.jsonl";
constexpr const char* kProfiles = "profiles.csv";
constexpr const char* kGroundTruth = "ground_truth.csv";
constexpr const char* kValidation = "validation.json";
constexpr const char* kDayStrings = "day_strings.csv";
constexpr const char* kEmbeddings = "embeddings.tsv";
constexpr const char* kTriplets = "triplets.jsonl";
constexpr const char* kTripletEval = "triplet_eval.json";
constexpr const char* kPoints = "points.csv";
constexpr const char* kTsneReport = "tsne.json";
constexpr const char* kClusters = "clusters.csv";
constexpr const char* kClusterSelection = "cluster_selection.json";
constexpr const char* kFingerprints = "fingerprints.csv";
constexpr const char* kTransitions = "transitions.json";
constexpr const char* kSimilarity = "similarity.csv";
constexpr const char* kComparison = "comparison.json";
constexpr const char* kParticipantClusters = "participant_clusters.csv";
constexpr const char* kParticipantClusterReport = "participant_clusters.json";
constexpr const char* kTsneMap = "tsne_map.svg";
constexpr const char* kScatter = "mmse_adas.svg";
constexpr const char* kTrajectoryDir = "trajectories";

class StageContext {
public:
    StageContext(std::string name, const PipelineConfig& config) : name_(std::move(name)), config_(config) {
        std::error_code ec;
        fs::create_directories(config.out_dir, ec);
        if (ec) throw IoError("cannot create output directory " + config.out_dir.string() + ": " + ec.message());
    }

    const PipelineConfig& config() const { return config_; }
    fs::path out(const std::string& name) const { return config_.out_dir / name; }

    /// Records an input; throws MissingArtifact when absent.
    fs::path input(const fs::path& path) {
        if (!fs::exists(path)) throw MissingArtifact(name_, path);
        inputs_.push_back(path);
        return path;
    }
    fs::path input_artifact(const std::string& name) { return input(out(name)); }

    void write(const std::string& name, const std::string& contents) {
        const fs::path path = out(name);
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write " + path.string());
        f << contents;
        if (!f) throw IoError("failed writing " + path.string());
        outputs_.push_back(path);
    }

    template <typename Fn>
    void write_with(const std::string& name, Fn&& fn) {
        std::ostringstream s;
        fn(s);
        write(name, s.str());
    }

    void finish(std::uint64_t seed) const {
        ordered_json m;
        m["stage"] = name_;
        m["tool_version"] = kToolVersion;
        m["config_hash"] = config_.hash();
        m["seed"] = seed;
        auto& in = m["inputs"] = ordered_json::array();
        for (const auto& p : inputs_) in.push_back({{"path", display(p)}, {"digest", file_digest(p)}});
        auto& outs = m["outputs"] = ordered_json::array();
        for (const auto& p : outputs_) outs.push_back({{"path", display(p)}, {"digest", file_digest(p)}});
        std::ofstream f(out("manifest_" + name_ + ".json"), std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write manifest for stage " + name_);
        f << m.dump(2) << '\n';
    }

private:
    // Paths inside out_dir are recorded relative to it so that runs into
    // different directories produce identical manifests.
    std::string display(const fs::path& p) const {
        const auto rel = p.lexically_relative(config_.out_dir);
        if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
        return p.generic_string();
    }

    std::string name_;
    const PipelineConfig& config_;
    std::vector<fs::path> inputs_;
    std::vector<fs::path> outputs_;
};

std::uint64_t stage_seed(const PipelineConfig& c, Stream s) {
    return derive_seed(c.seed, s);
}

WindowConfig window_config(const PipelineConfig& c) {
    WindowConfig w;
    w.window_minutes = c.window_minutes;
    w.utc_offset_minutes = c.utc_offset_minutes;
    return w;
}

// Points with a latent state, as written by the cluster stage.
struct LabelledPoints {
    std::vector<Point2D> points;
    std::vector<int> labels;
    int k = 0;
};

LabelledPoints read_clusters(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    LabelledPoints out;
    std::string line;
    std::getline(in, line);
    if (csv::trim(line) != "participant_id,date,x,y,state") {
        throw DataError(path.string() + ": unexpected header");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        const auto cells = csv::split(line);
        const auto bad = [&] { return DataError(path.string() + " line " + std::to_string(line_no) + " is malformed"); };
        if (cells.size() != 5) throw bad();
        const auto date = parse_iso_date(cells[1]);
        const auto x = csv::parse_number(cells[2]);
        const auto y = csv::parse_number(cells[3]);
        const auto state = csv::parse_integer(cells[4]);
        if (!date || !x || !y || !state || *state < 0) throw bad();
        out.points.push_back({cells[0], *date, *x, *y});
        out.labels.push_back(static_cast<int>(*state));
        out.k = std::max(out.k, static_cast<int>(*state) + 1);
    }
    return out;
}

std::vector<SimilarityResult> read_similarity(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (csv::trim(line) != "query,side,rank,participant_id,distance") {
        throw DataError(path.string() + ": unexpected header");
    }
    std::map<std::string, SimilarityResult> by_query;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        const auto cells = csv::split(line);
        const auto distance = cells.size() == 5 ? csv::parse_number(cells[4]) : std::nullopt;
        if (!distance || (cells[1] != "most" && cells[1] != "least")) {
            throw DataError(path.string() + " line " + std::to_string(line_no) + " is malformed");
        }
        auto& r = by_query[cells[0]];
        r.query = cells[0];
        (cells[1] == "most" ? r.most_similar : r.least_similar).push_back({cells[3], *distance});
    }
    std::vector<SimilarityResult> out;
    for (auto& [_, r] : by_query) out.push_back(std::move(r));
    return out;
}

std::map<std::string, int> read_participant_clusters(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::map<std::string, int> out;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (csv::trim(line).empty()) continue;
        const auto cells = csv::split(line);
        const auto c = cells.size() == 2 ? csv::parse_integer(cells[1]) : std::nullopt;
        if (!c) throw DataError(path.string() + ": malformed row");
        out[cells[0]] = static_cast<int>(*c);
    }
    return out;
}

ordered_json scores_json(const std::map<int, double>& scores) {
    ordered_json j = ordered_json::object();
    for (const auto& [k, s] : scores) j[std::to_string(k)] = s;
    return j;
}

// Stages ---------------------------------------------------------------------

void stage_synth(const PipelineConfig& c) {
    StageContext ctx("synth", c);
    GenerateOptions opts;
    opts.participants_per_archetype = c.participants_per_archetype;
    opts.days = c.synth_days;
    opts.seed = stage_seed(c, synth_stream);
    opts.start_date = *parse_iso_date(c.synth_start_date);
    const auto archetypes = reference_archetypes();
    const auto synthetic = generate_cohort(archetypes, opts);
    ctx.write_with(kEvents, [&](std::ostream& o) { write_events(o, flatten_events(synthetic.cohort)); });
    ctx.write_with(kProfiles, [&](std::ostream& o) { write_profiles(o, synthetic.cohort.profiles); });
    ctx.write_with(kGroundTruth, [&](std::ostream& o) { write_ground_truth(o, synthetic.ground_truth); });
    ctx.finish(opts.seed);
}

void stage_preprocess(const PipelineConfig& c) {
    StageContext ctx("preprocess", c);
    const auto parsed = read_events_file(ctx.input(c.events_path()));
    if (!parsed.issues.empty()) {
        std::string msg = std::to_string(parsed.issues.size()) + " malformed event line(s) in " +
                          c.events_path().string() + ":";
        for (std::size_t i = 0; i < std::min<std::size_t>(parsed.issues.size(), 10); ++i) {
            msg += "\n  line " + std::to_string(parsed.issues[i].line) + ": " + parsed.issues[i].message;
        }
        throw DataError(msg);
    }
    auto profiles = read_profiles_file(ctx.input(c.profiles_path()));
    const Cohort cohort = Cohort::assemble(parsed.records, std::move(profiles),
                                           std::chrono::minutes{c.utc_offset_minutes});
    const auto report = validate_cohort(cohort);
    ctx.write(kValidation, validation_to_json(report) + "\n");
    const Cohort eligible = filter_cohort(cohort, report, c.min_days);
    if (eligible.events.empty()) {
        throw DataError("no participant has a complete profile and at least " + std::to_string(c.min_days) +
                        " recorded days");
    }
    const auto days = window_cohort(eligible, window_config(c));
    ctx.write_with(kDayStrings, [&](std::ostream& o) { write_day_strings(o, days); });
    ctx.finish(c.seed);
}

void stage_embed(const PipelineConfig& c) {
    StageContext ctx("embed", c);
    const auto days = read_day_strings_file(ctx.input_artifact(kDayStrings), 1440 / c.window_minutes);
    std::uint64_t seed = 0;
    if (c.embedding_source == "hash") {
        seed = stage_seed(c, embed_stream);
        const auto set = hash_embed_all(days, c.embedding_dim, seed);
        ctx.write_with(kEmbeddings, [&](std::ostream& o) { write_embeddings(o, set); });
    } else {
        const auto loaded = load_embeddings(ctx.input(c.embeddings));
        EmbeddingSet set(loaded.dimension());
        for (const auto& d : days) {
            const auto* e = loaded.find(d.key());
            if (!e) {
                throw DataError(c.embeddings.string() + " has no embedding for " + d.participant_id + " " +
                                format_iso_date(d.date));
            }
            set.add(*e);
        }
        ctx.write_with(kEmbeddings, [&](std::ostream& o) { write_embeddings(o, set); });
    }
    ctx.finish(seed);
}

void stage_triplets(const PipelineConfig& c) {
    StageContext ctx("triplets", c);
    const auto days = read_day_strings_file(ctx.input_artifact(kDayStrings), 1440 / c.window_minutes);
    const auto embeddings = load_embeddings(ctx.input_artifact(kEmbeddings));
    const std::uint64_t seed = stage_seed(c, triplet_stream);
    const auto encoding = one_hot_encode(days);
    const auto model = kmeans_fit(encoding.rows, c.triplet_onehot_k, seed);
    const auto triplets = select_triplets(days, model.labels, c.triplet_count, c.triplet_window_days, seed);
    ctx.write_with(kTriplets, [&](std::ostream& o) { write_triplets(o, triplets); });
    const auto score = triplet_accuracy(embeddings, triplets, c.triplet_margin);
    ordered_json j;
    j["count"] = score.count;
    j["accuracy"] = score.accuracy;
    j["mean_loss"] = score.mean_loss;
    j["margin"] = c.triplet_margin;
    j["onehot_k"] = c.triplet_onehot_k;
    j["onehot_inertia"] = model.inertia;
    ctx.write(kTripletEval, j.dump(2) + "\n");
    ctx.finish(seed);
}

void stage_tsne(const PipelineConfig& c) {
    StageContext ctx("tsne", c);
    const auto embeddings = load_embeddings(ctx.input_artifact(kEmbeddings));
    TsneConfig cfg = c.tsne;
    cfg.seed = stage_seed(c, tsne_stream);
    cfg.kl_every = 100;
    const auto result = tsne_embed(embeddings.to_matrix(), cfg);
    std::vector<Point2D> points;
    points.reserve(embeddings.size());
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
        points.push_back({embeddings[i].participant_id, embeddings[i].date, result.embedding(i, 0),
                          result.embedding(i, 1)});
    }
    ctx.write_with(kPoints, [&](std::ostream& o) { write_points(o, points); });
    ordered_json j;
    j["n"] = points.size();
    j["perplexity"] = cfg.perplexity;
    j["target_entropy_bits"] = std::log2(cfg.perplexity);
    const auto [lo, hi] = std::minmax_element(result.entropies_bits.begin(), result.entropies_bits.end());
    j["entropy_bits_min"] = *lo;
    j["entropy_bits_max"] = *hi;
    auto& trace = j["kl_trace"] = ordered_json::array();
    for (const auto& s : result.kl_trace) trace.push_back({{"iteration", s.iteration}, {"kl", s.kl}});
    ctx.write(kTsneReport, j.dump(2) + "\n");
    ctx.finish(cfg.seed);
}

void stage_cluster(const PipelineConfig& c) {
    StageContext ctx("cluster", c);
    const auto points = read_points_file(ctx.input_artifact(kPoints));
    Matrix m(points.size(), 2);
    for (std::size_t i = 0; i < points.size(); ++i) {
        m(i, 0) = points[i].x;
        m(i, 1) = points[i].y;
    }
    const std::uint64_t seed = stage_seed(c, cluster_stream);
    const auto selection = select_k(m, c.k_range, seed);
    const int k = c.k_latent == 0 ? selection.best_k : c.k_latent;
    const ClusterModel model = k == selection.best_k ? selection.model : kmeans_fit(m, k, seed);
    ctx.write_with(kClusters, [&](std::ostream& o) {
        o << "participant_id,date,x,y,state\n";
        for (std::size_t i = 0; i < points.size(); ++i) {
            o << csv::escape(points[i].participant_id) << ',' << format_iso_date(points[i].date) << ','
              << csv::format_number(points[i].x) << ',' << csv::format_number(points[i].y) << ','
              << model.labels[i] << '\n';
        }
    });
    ordered_json j;
    j["k_range"] = c.k_range;
    j["silhouette"] = scores_json(selection.scores);
    j["best_k"] = selection.best_k;
    j["k_used"] = k;
    j["model"] = ordered_json::parse(model_to_json(model));
    ctx.write(kClusterSelection, j.dump(2) + "\n");
    ctx.finish(seed);
}

void stage_fingerprint(const PipelineConfig& c) {
    StageContext ctx("fingerprint", c);
    const auto data = read_clusters(ctx.input_artifact(kClusters));
    if (data.points.empty()) throw DataError("clusters file is empty");
    int k = data.k;
    // Prefer the k recorded by the cluster stage: a state may be unused.
    if (fs::exists(ctx.out(kClusterSelection))) {
        std::ifstream in(ctx.input_artifact(kClusterSelection));
        const auto sel = nlohmann::json::parse(in, nullptr, false);
        if (sel.is_object() && sel.contains("k_used") && sel["k_used"].is_number_integer()) {
            k = std::max(k, sel["k_used"].get<int>());
        }
    }
    PageRankOptions pr;
    pr.alpha = c.alpha;
    const auto fps = fingerprint_all(data.points, data.labels, k, c.threshold, pr, c.transition_mode);
    ctx.write_with(kFingerprints, [&](std::ostream& o) { write_fingerprints(o, fps); });
    ordered_json j = ordered_json::array();
    for (const auto& fp : fps) {
        ordered_json row;
        row["participant_id"] = fp.state.participant_id;
        row["threshold"] = fp.transitions.threshold;
        row["iterations"] = fp.state.iterations;
        row["converged"] = fp.state.converged;
        row["entropy_bits"] = fp.state.entropy_bits();
        auto& counts = row["counts"] = ordered_json::array();
        auto& values = row["values"] = ordered_json::array();
        for (std::size_t a = 0; a < fp.transitions.counts.rows(); ++a) {
            const auto cr = fp.transitions.counts.row(a);
            const auto vr = fp.transitions.values.row(a);
            counts.push_back(std::vector<double>(cr.begin(), cr.end()));
            values.push_back(std::vector<double>(vr.begin(), vr.end()));
        }
        j.push_back(std::move(row));
    }
    ctx.write(kTransitions, j.dump(2) + "\n");
    ctx.finish(c.seed);
}

void stage_similar(const PipelineConfig& c) {
    StageContext ctx("similar", c);
    const auto fps = read_fingerprints_file(ctx.input_artifact(kFingerprints));
    const auto results = rank_all(fps, c.metric == "l1" ? Metric::l1 : Metric::l2);
    ctx.write_with(kSimilarity, [&](std::ostream& o) {
        o << "query,side,rank,participant_id,distance\n";
        for (const auto& r : results) {
            for (std::size_t i = 0; i < r.most_similar.size(); ++i) {
                o << csv::escape(r.query) << ",most," << i + 1 << ',' << csv::escape(r.most_similar[i].participant_id)
                  << ',' << csv::format_number(r.most_similar[i].distance) << '\n';
            }
            for (std::size_t i = 0; i < r.least_similar.size(); ++i) {
                o << csv::escape(r.query) << ",least," << i + 1 << ','
                  << csv::escape(r.least_similar[i].participant_id) << ','
                  << csv::format_number(r.least_similar[i].distance) << '\n';
            }
        }
    });
    ctx.finish(c.seed);
}

void stage_cohort(const PipelineConfig& c) {
    StageContext ctx("cohort", c);
    const auto fps = read_fingerprints_file(ctx.input_artifact(kFingerprints));
    const auto similarity = read_similarity(ctx.input_artifact(kSimilarity));
    const auto profiles = read_profiles_file(ctx.input(c.profiles_path()));
    const std::vector<ComparisonReport> reports = {compare_groups(profiles, similarity, Side::most),
                                                   compare_groups(profiles, similarity, Side::least)};
    ctx.write(kComparison, comparison_to_json(reports) + "\n");

    const std::uint64_t seed = stage_seed(c, cohort_stream);
    const int max_k = *std::max_element(c.participant_k_range.begin(), c.participant_k_range.end());
    ordered_json j;
    j["k_range"] = c.participant_k_range;
    std::string table = "participant_id,cluster\n";
    if (fps.size() < static_cast<std::size_t>(max_k) + 1) {
        j["skipped"] = "needs at least " + std::to_string(max_k + 1) + " participants";
    } else {
        const auto selection = cluster_participants(fps, c.participant_k_range, seed);
        j["silhouette"] = scores_json(selection.scores);
        j["best_k"] = selection.best_k;
        for (std::size_t i = 0; i < fps.size(); ++i) {
            table += csv::escape(fps[i].participant_id) + ',' + std::to_string(selection.model.labels[i]) + '\n';
        }
    }
    ctx.write(kParticipantClusters, table);
    ctx.write(kParticipantClusterReport, j.dump(2) + "\n");
    ctx.finish(seed);
}

void stage_report(const PipelineConfig& c) {
    StageContext ctx("report", c);
    const auto data = read_clusters(ctx.input_artifact(kClusters));
    const auto profiles = read_profiles_file(ctx.input(c.profiles_path()));
    const auto groups = read_participant_clusters(ctx.input_artifact(kParticipantClusters));
    if (data.points.empty()) throw DataError("clusters file is empty");

    double x0 = data.points[0].x, x1 = x0, y0 = data.points[0].y, y1 = y0;
    for (const auto& p : data.points) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    std::vector<std::pair<std::string, std::string>> state_legend;
    for (int s = 0; s < data.k; ++s) state_legend.emplace_back("state " + std::to_string(s), std::string(palette(s)));

    SvgPlot map("t-SNE map of participant-days", "t-SNE 1", "t-SNE 2");
    map.set_extent(x0, x1, y0, y1);
    for (std::size_t i = 0; i < data.points.size(); ++i) {
        map.point(data.points[i].x, data.points[i].y, palette(static_cast<std::size_t>(data.labels[i])), 1.5, 0.5);
    }
    map.legend(state_legend);
    ctx.write(kTsneMap, map.str());

    std::map<std::string, std::vector<std::size_t>> by_participant;
    for (std::size_t i = 0; i < data.points.size(); ++i) by_participant[data.points[i].participant_id].push_back(i);
    for (auto& [id, idx] : by_participant) {
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return data.points[a].date < data.points[b].date; });
        SvgPlot plot("Trajectory of " + id, "t-SNE 1", "t-SNE 2");
        plot.set_extent(x0, x1, y0, y1);
        for (std::size_t i = 0; i < data.points.size(); ++i) {
            plot.point(data.points[i].x, data.points[i].y, "#dddddd", 1.0, 0.6);
        }
        std::vector<std::pair<double, double>> path;
        for (const auto i : idx) path.emplace_back(data.points[i].x, data.points[i].y);
        plot.polyline(path, "#333333", 0.6, 0.5);
        for (const auto i : idx) {
            plot.point(data.points[i].x, data.points[i].y, palette(static_cast<std::size_t>(data.labels[i])), 2.2, 0.9);
        }
        plot.legend(state_legend);
        ctx.write(std::string(kTrajectoryDir) + "/" + id + ".svg", plot.str());
    }

    SvgPlot scatter("MMSE vs ADAS-Cog by participant cluster", "MMSE", "ADAS-Cog");
    std::vector<std::tuple<double, double, int>> marks;
    for (const auto& [id, p] : profiles) {
        if (!p.mmse || !p.adas_cog) continue;
        const auto g = groups.find(id);
        marks.emplace_back(*p.mmse, *p.adas_cog, g == groups.end() ? -1 : g->second);
    }
    if (!marks.empty()) {
        double a0 = std::get<0>(marks[0]), a1 = a0, b0 = std::get<1>(marks[0]), b1 = b0;
        for (const auto& [a, b, _] : marks) {
            a0 = std::min(a0, a);
            a1 = std::max(a1, a);
            b0 = std::min(b0, b);
            b1 = std::max(b1, b);
        }
        scatter.set_extent(a0, a1, b0, b1);
    }
    std::set<int> seen;
    for (const auto& [a, b, g] : marks) {
        scatter.point(a, b, g < 0 ? "#999999" : palette(static_cast<std::size_t>(g)), 4.0, 0.8);
        seen.insert(g);
    }
    std::vector<std::pair<std::string, std::string>> legend;
    for (const int g : seen) {
        legend.emplace_back(g < 0 ? "unclustered" : "cluster " + std::to_string(g),
                            g < 0 ? "#999999" : std::string(palette(static_cast<std::size_t>(g))));
    }
    scatter.legend(legend);
    ctx.write(kScatter, scatter.str());
    ctx.finish(c.seed);
}

using StageFn = void (*)(const PipelineConfig&);

const std::vector<std::pair<std::string, StageFn>>& registry() {
    static const std::vector<std::pair<std::string, StageFn>> stages = {
        {"synth", stage_synth},       {"preprocess", stage_preprocess},   {"embed", stage_embed},
        {"triplets", stage_triplets}, {"tsne", stage_tsne},               {"cluster", stage_cluster},
        {"fingerprint", stage_fingerprint}, {"similar", stage_similar},   {"cohort", stage_cohort},
        {"report", stage_report}};
    return stages;
}

}  // namespace

const std::vector<std::string>& stage_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, _] : registry()) out.push_back(name);
        return out;
    }();
    return names;
}

void run_stage(std::string_view stage, const PipelineConfig& config) {
    config.validate();
    for (const auto& [name, fn] : registry()) {
        if (name == stage) {
            fn(config);
            return;
        }
    }
    throw ConfigError("unknown stage '" + std::string(stage) + "'");
}

void run_pipeline(const PipelineConfig& config, bool with_synth) {
    for (const auto& name : stage_names()) {
        if (name == "synth" && !with_synth) continue;
        run_stage(name, config);
    }
}

int exit_code_for(const std::exception& error) {
    if (dynamic_cast<const ConfigError*>(&error)) return kExitConfig;
    if (dynamic_cast<const MissingArtifact*>(&error)) return kExitMissingArtifact;
    return kExitData;
}

}  // namespace latentflow::pipeline
