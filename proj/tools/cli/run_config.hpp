#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rgnn/data.hpp"
#include "rgnn/eval.hpp"
#include "rgnn/train.hpp"

namespace rgnn::cli {

/// One experiment record. Sections:
///   synth      SynthConfig fields; `subjects` and `seed` required when present
///   train      TrainConfig fields; `epochs` required when present
///   adjacency  init, delta, calibrate, sparsity_target, layout, global_pairs
///   protocol   "subject_dependent" | "loso"
///   train_trials, bands, jobs
struct RunConfig {
  std::optional<SynthConfig> synth;
  bool has_train = false;
  ProtocolConfig protocol;
  std::vector<std::string> bands;
};

/// Throws ConfigError naming the offending key for unknown keys, wrong types and missing required fields.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);

}  // namespace rgnn::cli
