#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "latentflow/error.hpp"
#include "latentflow/stateflow.hpp"
#include "latentflow/tsne.hpp"

namespace latentflow::pipeline {

/// Invalid or inconsistent configuration; the message names the field.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// An upstream artifact a stage depends on does not exist.
class MissingArtifact : public Error {
public:
    MissingArtifact(std::string stage, const std::filesystem::path& path)
        : Error("stage '" + stage + "' needs " + path.string() + ", which does not exist"),
          stage_(std::move(stage)) {}

    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

struct PipelineConfig {
    // Inputs. Empty events/profiles mean "use the synth outputs in out_dir".
    std::filesystem::path events;
    std::filesystem::path profiles;
    std::filesystem::path embeddings;  // used when embedding_source == "load"
    std::filesystem::path out_dir = "out";

    int window_minutes = 20;
    int utc_offset_minutes = 0;
    std::size_t min_days = 1;

    std::string embedding_source = "hash";  // hash | load
    std::size_t embedding_dim = 384;

    std::size_t triplet_count = 10000;
    int triplet_window_days = 30;
    double triplet_margin = 1.0;
    int triplet_onehot_k = 5;

    TsneConfig tsne;

    int k_latent = 5;  // 0 selects the best k in k_range
    std::vector<int> k_range = {4, 5, 6, 7};
    std::vector<int> participant_k_range = {2, 3, 4, 5, 6, 7, 8};

    std::optional<double> threshold;  // nullopt = median pairwise distance
    TransitionMode transition_mode = TransitionMode::proximity;
    double alpha = 0.85;
    std::string metric = "l1";  // l1 | l2

    std::size_t participants_per_archetype = 10;
    std::size_t synth_days = 180;
    std::string synth_start_date = "2023-07-31";

    std::uint64_t seed = 0;

    /// Throws ConfigError naming the first offending field.
    void validate() const;

    /// Serialised form; `include_out_dir` false is what the config hash covers,
    /// so runs into different directories share a hash.
    std::string to_json(bool include_out_dir = true) const;
    std::string hash() const;

    /// Resolved input locations.
    std::filesystem::path events_path() const;
    std::filesystem::path profiles_path() const;
};

/// Parses a JSON config; unknown keys and wrong types raise ConfigError.
PipelineConfig parse_config(const std::string& json_text);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace latentflow::pipeline
