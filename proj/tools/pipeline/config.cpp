#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "latentflow/hash.hpp"
#include "latentflow/time.hpp"

namespace latentflow::pipeline {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigError("config field '" + field + "': " + what);
}

template <typename T>
T get(const json& value, const std::string& field) {
    try {
        if constexpr (std::is_same_v<T, double>) {
            if (!value.is_number()) fail(field, "expected a number");
        } else if constexpr (std::is_integral_v<T>) {
            if (!value.is_number_integer()) fail(field, "expected an integer");
            if constexpr (std::is_unsigned_v<T>) {
                if (value.is_number_integer() && value.get<long long>() < 0) fail(field, "must not be negative");
            }
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!value.is_string()) fail(field, "expected a string");
        }
        return value.get<T>();
    } catch (const json::exception& e) {
        fail(field, e.what());
    }
}

std::vector<int> get_int_list(const json& value, const std::string& field) {
    if (!value.is_array()) fail(field, "expected an array of integers");
    std::vector<int> out;
    for (const auto& v : value) out.push_back(get<int>(v, field));
    return out;
}

void check_keys(const json& object, const std::string& prefix, const std::set<std::string>& allowed) {
    if (!object.is_object()) fail(prefix.empty() ? "<root>" : prefix, "expected an object");
    for (const auto& [key, _] : object.items()) {
        if (!allowed.contains(key)) fail(prefix.empty() ? key : prefix + "." + key, "unknown key");
    }
}

void check_k_range(const std::vector<int>& range, const std::string& field) {
    if (range.empty()) fail(field, "must not be empty");
    if (*std::min_element(range.begin(), range.end()) < 2) fail(field, "every k must be at least 2");
    if (std::set<int>(range.begin(), range.end()).size() != range.size()) fail(field, "contains duplicates");
}

}  // namespace

void PipelineConfig::validate() const {
    if (window_minutes <= 0 || 1440 % window_minutes != 0) fail("window_minutes", "must divide 1440");
    if (utc_offset_minutes < -14 * 60 || utc_offset_minutes > 14 * 60) fail("utc_offset_minutes", "out of range");
    if (embedding_source != "hash" && embedding_source != "load") fail("embedding.source", "must be 'hash' or 'load'");
    if (embedding_source == "load" && embeddings.empty()) fail("paths.embeddings", "required when embedding.source is 'load'");
    if (embedding_dim < 16) fail("embedding.dim", "must be at least 16");
    if (triplet_count == 0) fail("triplets.count", "must be positive");
    if (triplet_window_days < 0) fail("triplets.window_days", "must not be negative");
    if (!(triplet_margin >= 0.0)) fail("triplets.margin", "must not be negative");
    if (triplet_onehot_k < 2) fail("triplets.onehot_k", "must be at least 2");
    if (!(tsne.perplexity >= 1.0)) fail("tsne.perplexity", "must be at least 1");
    if (tsne.iterations < 1) fail("tsne.iterations", "must be positive");
    if (!(tsne.learning_rate > 0.0)) fail("tsne.learning_rate", "must be positive");
    if (!(tsne.early_exaggeration >= 1.0)) fail("tsne.early_exaggeration", "must be at least 1");
    if (tsne.exaggeration_iterations < 0) fail("tsne.exaggeration_iterations", "must not be negative");
    check_k_range(k_range, "k_range");
    check_k_range(participant_k_range, "participant_k_range");
    if (k_latent != 0 && k_latent < 2) fail("k_latent", "must be 0 (auto) or at least 2");
    if (threshold && !(*threshold > 0.0)) fail("threshold", "must be 'median' or a positive number");
    if (!(alpha >= 0.0 && alpha < 1.0)) fail("alpha", "must lie in [0, 1)");
    if (metric != "l1" && metric != "l2") fail("metric", "must be 'l1' or 'l2'");
    if (participants_per_archetype == 0) fail("synth.participants_per_archetype", "must be positive");
    if (synth_days == 0) fail("synth.days", "must be positive");
    if (!parse_iso_date(synth_start_date)) fail("synth.start_date", "expected YYYY-MM-DD");
}

std::string PipelineConfig::to_json(bool include_out_dir) const {
    ordered_json j;
    auto& paths = j["paths"] = ordered_json::object();
    paths["events"] = events.generic_string();
    paths["profiles"] = profiles.generic_string();
    paths["embeddings"] = embeddings.generic_string();
    if (include_out_dir) paths["out_dir"] = out_dir.generic_string();
    j["window_minutes"] = window_minutes;
    j["utc_offset_minutes"] = utc_offset_minutes;
    j["min_days"] = min_days;
    j["embedding"] = {{"source", embedding_source}, {"dim", embedding_dim}};
    j["triplets"] = {{"count", triplet_count},
                     {"window_days", triplet_window_days},
                     {"margin", triplet_margin},
                     {"onehot_k", triplet_onehot_k}};
    j["tsne"] = {{"perplexity", tsne.perplexity},
                 {"iterations", tsne.iterations},
                 {"learning_rate", tsne.learning_rate},
                 {"early_exaggeration", tsne.early_exaggeration},
                 {"exaggeration_iterations", tsne.exaggeration_iterations}};
    j["k_latent"] = k_latent;
    j["k_range"] = k_range;
    j["participant_k_range"] = participant_k_range;
    j["threshold"] = threshold ? ordered_json(*threshold) : ordered_json("median");
    j["transition_mode"] = transition_mode == TransitionMode::proximity ? "proximity" : "temporal";
    j["alpha"] = alpha;
    j["metric"] = metric;
    j["synth"] = {{"participants_per_archetype", participants_per_archetype},
                  {"days", synth_days},
                  {"start_date", synth_start_date}};
    j["seed"] = seed;
    return j.dump(2);
}

std::string PipelineConfig::hash() const {
    return hex64(fnv1a64(to_json(false)));
}

std::filesystem::path PipelineConfig::events_path() const {
    return events.empty() ? out_dir / "events.jsonl" : events;
}

std::filesystem::path PipelineConfig::profiles_path() const {
    return profiles.empty() ? out_dir / "profiles.csv" : profiles;
}

PipelineConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(root, "",
               {"paths", "window_minutes", "utc_offset_minutes", "min_days", "embedding", "triplets", "tsne",
                "k_latent", "k_range", "participant_k_range", "threshold", "transition_mode", "alpha", "metric",
                "synth", "seed"});
    PipelineConfig c;
    if (root.contains("paths")) {
        const auto& p = root["paths"];
        check_keys(p, "paths", {"events", "profiles", "embeddings", "out_dir"});
        if (p.contains("events")) c.events = get<std::string>(p["events"], "paths.events");
        if (p.contains("profiles")) c.profiles = get<std::string>(p["profiles"], "paths.profiles");
        if (p.contains("embeddings")) c.embeddings = get<std::string>(p["embeddings"], "paths.embeddings");
        if (p.contains("out_dir")) c.out_dir = get<std::string>(p["out_dir"], "paths.out_dir");
    }
    if (root.contains("window_minutes")) c.window_minutes = get<int>(root["window_minutes"], "window_minutes");
    if (root.contains("utc_offset_minutes")) {
        c.utc_offset_minutes = get<int>(root["utc_offset_minutes"], "utc_offset_minutes");
    }
    if (root.contains("min_days")) c.min_days = get<std::size_t>(root["min_days"], "min_days");
    if (root.contains("embedding")) {
        const auto& e = root["embedding"];
        check_keys(e, "embedding", {"source", "dim"});
        if (e.contains("source")) c.embedding_source = get<std::string>(e["source"], "embedding.source");
        if (e.contains("dim")) c.embedding_dim = get<std::size_t>(e["dim"], "embedding.dim");
    }
    if (root.contains("triplets")) {
        const auto& t = root["triplets"];
        check_keys(t, "triplets", {"count", "window_days", "margin", "onehot_k"});
        if (t.contains("count")) c.triplet_count = get<std::size_t>(t["count"], "triplets.count");
        if (t.contains("window_days")) c.triplet_window_days = get<int>(t["window_days"], "triplets.window_days");
        if (t.contains("margin")) c.triplet_margin = get<double>(t["margin"], "triplets.margin");
        if (t.contains("onehot_k")) c.triplet_onehot_k = get<int>(t["onehot_k"], "triplets.onehot_k");
    }
    if (root.contains("tsne")) {
        const auto& t = root["tsne"];
        check_keys(t, "tsne",
                   {"perplexity", "iterations", "learning_rate", "early_exaggeration", "exaggeration_iterations"});
        if (t.contains("perplexity")) c.tsne.perplexity = get<double>(t["perplexity"], "tsne.perplexity");
        if (t.contains("iterations")) c.tsne.iterations = get<int>(t["iterations"], "tsne.iterations");
        if (t.contains("learning_rate")) c.tsne.learning_rate = get<double>(t["learning_rate"], "tsne.learning_rate");
        if (t.contains("early_exaggeration")) {
            c.tsne.early_exaggeration = get<double>(t["early_exaggeration"], "tsne.early_exaggeration");
        }
        if (t.contains("exaggeration_iterations")) {
            c.tsne.exaggeration_iterations = get<int>(t["exaggeration_iterations"], "tsne.exaggeration_iterations");
        }
    }
    if (root.contains("k_latent")) c.k_latent = get<int>(root["k_latent"], "k_latent");
    if (root.contains("k_range")) c.k_range = get_int_list(root["k_range"], "k_range");
    if (root.contains("participant_k_range")) {
        c.participant_k_range = get_int_list(root["participant_k_range"], "participant_k_range");
    }
    if (root.contains("threshold")) {
        const auto& t = root["threshold"];
        if (t.is_string()) {
            if (t.get<std::string>() != "median") fail("threshold", "must be 'median' or a positive number");
        } else {
            c.threshold = get<double>(t, "threshold");
        }
    }
    if (root.contains("transition_mode")) {
        const auto mode = get<std::string>(root["transition_mode"], "transition_mode");
        if (mode == "proximity") {
            c.transition_mode = TransitionMode::proximity;
        } else if (mode == "temporal") {
            c.transition_mode = TransitionMode::temporal;
        } else {
            fail("transition_mode", "must be 'proximity' or 'temporal'");
        }
    }
    if (root.contains("alpha")) c.alpha = get<double>(root["alpha"], "alpha");
    if (root.contains("metric")) c.metric = get<std::string>(root["metric"], "metric");
    if (root.contains("synth")) {
        const auto& s = root["synth"];
        check_keys(s, "synth", {"participants_per_archetype", "days", "start_date"});
        if (s.contains("participants_per_archetype")) {
            c.participants_per_archetype =
                get<std::size_t>(s["participants_per_archetype"], "synth.participants_per_archetype");
        }
        if (s.contains("days")) c.synth_days = get<std::size_t>(s["days"], "synth.days");
        if (s.contains("start_date")) c.synth_start_date = get<std::string>(s["start_date"], "synth.start_date");
    }
    if (root.contains("seed")) c.seed = get<std::uint64_t>(root["seed"], "seed");
    c.validate();
    return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

}  // namespace latentflow::pipeline
