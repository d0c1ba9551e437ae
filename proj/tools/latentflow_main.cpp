#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pipeline/config.hpp"
#include "pipeline/stages.hpp"

namespace lp = latentflow::pipeline;

namespace {

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> events;
    std::optional<std::string> profiles;
    std::optional<std::string> embeddings;
    std::optional<std::string> embedding_source;
    std::optional<int> k_latent;
    std::optional<std::string> threshold;
    std::optional<int> tsne_iterations;
    std::optional<double> perplexity;
    std::optional<std::size_t> participants_per_archetype;
    std::optional<std::size_t> days;
    std::optional<std::size_t> triplet_count;
    std::optional<std::string> metric;

    lp::PipelineConfig resolve() const {
        lp::PipelineConfig c = config_path.empty() ? lp::PipelineConfig{} : lp::load_config(config_path);
        if (seed) c.seed = *seed;
        if (out_dir) c.out_dir = *out_dir;
        if (events) c.events = *events;
        if (profiles) c.profiles = *profiles;
        if (embeddings) c.embeddings = *embeddings;
        if (embedding_source) c.embedding_source = *embedding_source;
        if (k_latent) c.k_latent = *k_latent;
        if (threshold) {
            if (*threshold == "median") {
                c.threshold.reset();
            } else {
                try {
                    c.threshold = std::stod(*threshold);
                } catch (const std::exception&) {
                    throw lp::ConfigError("config field 'threshold': must be 'median' or a positive number");
                }
            }
        }
        if (tsne_iterations) c.tsne.iterations = *tsne_iterations;
        if (perplexity) c.tsne.perplexity = *perplexity;
        if (participants_per_archetype) c.participants_per_archetype = *participants_per_archetype;
        if (days) c.synth_days = *days;
        if (triplet_count) c.triplet_count = *triplet_count;
        if (metric) c.metric = *metric;
        c.validate();
        return c;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"latentflow: activity logs to latent-state PageRank fingerprints"};
    app.require_subcommand(1);
    app.fallthrough();

    Overrides o;
    app.add_option("--config", o.config_path, "JSON config file");
    app.add_option("--seed", o.seed, "Master seed");
    app.add_option("--out-dir", o.out_dir, "Artifact directory");
    app.add_option("--events", o.events, "Events JSONL (default: <out-dir>/events.jsonl)");
    app.add_option("--profiles", o.profiles, "Profiles CSV (default: <out-dir>/profiles.csv)");
    app.add_option("--embeddings", o.embeddings, "Embedding TSV to load");
    app.add_option("--embedding-source", o.embedding_source, "hash or load");
    app.add_option("--k-latent", o.k_latent, "Number of latent states (0 = best silhouette)");
    app.add_option("--threshold", o.threshold, "Proximity threshold: 'median' or a number");
    app.add_option("--tsne-iterations", o.tsne_iterations, "t-SNE iterations");
    app.add_option("--perplexity", o.perplexity, "t-SNE perplexity");
    app.add_option("--participants-per-archetype", o.participants_per_archetype, "synth: participants per archetype");
    app.add_option("--days", o.days, "synth: days per participant");
    app.add_option("--triplet-count", o.triplet_count, "Number of triplets to sample");
    app.add_option("--metric", o.metric, "Fingerprint metric: l1 or l2");

    const std::vector<std::pair<std::string, std::string>> descriptions = {
        {"synth", "Generate the synthetic reference cohort"},
        {"preprocess", "Validate events and window them into day strings"},
        {"embed", "Embed day strings (hash baseline or load a TSV)"},
        {"triplets", "Sample contrastive triplets and score the embeddings"},
        {"tsne", "Project embeddings to 2D"},
        {"cluster", "K-means latent states with silhouette sweep"},
        {"fingerprint", "Per-participant transition matrices and PageRank vectors"},
        {"similar", "Most and least similar participants"},
        {"cohort", "Paired comparisons and participant clustering"},
        {"report", "SVG figures"},
    };
    for (const auto& [name, text] : descriptions) app.add_subcommand(name, text);
    auto* pipeline = app.add_subcommand("pipeline", "Run every stage in order (synth when no events file is set)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return lp::kExitConfig;
    }

    try {
        const auto config = o.resolve();
        const auto* sub = app.get_subcommands().front();
        if (sub == pipeline) {
            lp::run_pipeline(config, config.events.empty());
        } else {
            lp::run_stage(sub->get_name(), config);
        }
    } catch (const std::exception& e) {
        std::cerr << "latentflow: " << e.what() << '\n';
        return lp::exit_code_for(e);
    }
    return lp::kExitOk;
}
