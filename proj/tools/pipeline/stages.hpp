#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"

namespace latentflow::pipeline {

/// Stage names in pipeline order.
const std::vector<std::string>& stage_names();

/// Runs one stage. Reads upstream artifacts from config.out_dir (or the
/// configured input paths) and writes its outputs plus manifest_<stage>.json.
/// Throws MissingArtifact, ConfigError or a library Error.
void run_stage(std::string_view stage, const PipelineConfig& config);

/// Every stage except synth, in order. `with_synth` prepends synth.
void run_pipeline(const PipelineConfig& config, bool with_synth);

/// Process exit code for an exception thrown by a stage.
int exit_code_for(const std::exception& error);

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitMissingArtifact = 3;
inline constexpr int kExitData = 4;

}  // namespace latentflow::pipeline
