#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rgnn/data.hpp"
#include "rgnn/electrodes.hpp"
#include "rgnn/model.hpp"
#include "rgnn/params.hpp"
#include "rgnn/train.hpp"

namespace rgnn {

using ConfusionMatrix = std::vector<std::vector<std::size_t>>;  // rows = true class

struct Evaluation {
  double accuracy = 0.0;
  ConfusionMatrix confusion;
  std::vector<std::size_t> predictions;
};

/// Argmax over class probabilities, ties to the lowest class index.
std::size_t predict_class(const Vector& probs);

/// Dropout off. Accuracy is trace / total; an empty test set yields accuracy 0.
Evaluation evaluate(const ParamSet& params, const ModelConfig& model, const FeatureDataset& test);

enum class Protocol { subject_dependent, loso };

std::string_view to_string(Protocol protocol) noexcept;
Protocol parse_protocol(std::string_view name);

struct ProtocolConfig {
  Protocol protocol = Protocol::loso;
  TrainConfig train;
  /// Trials per subject used for training under subject_dependent.
  std::size_t train_trials = 9;
  /// Folds trained concurrently.
  std::size_t jobs = 1;
};

void to_json(nlohmann::json& j, const ProtocolConfig& c);

using TrialKey = std::pair<std::int64_t, std::int64_t>;  // (subject, trial)

struct FoldResult {
  std::int64_t subject = 0;
  double accuracy = 0.0;
  std::size_t test_size = 0;
  ConfusionMatrix confusion;
  TrainResult trained;
  /// Distinct (subject, trial) groups seen by training and by testing, sorted.
  std::vector<TrialKey> train_groups;
  std::vector<TrialKey> test_groups;
};

struct EvalReport {
  std::vector<FoldResult> folds;
  double mean = 0.0;
  /// Population standard deviation over folds.
  double std = 0.0;
  /// Summed over folds.
  ConfusionMatrix confusion;
  ProtocolConfig config;
};

/// {folds: [{subject, accuracy, test_size}], mean, std, confusion, config}
nlohmann::json report_json(const EvalReport& report);

/// Trains and tests every fold. With a domain head on, each fold's unlabeled test features are the target.
/// `on_fold` runs after each fold finishes (from the worker thread, serialized by a lock).
EvalReport run_protocol(const FeatureDataset& ds, const ProtocolConfig& config,
                        const std::function<void(const FoldResult&)>& on_fold = {});

/// Diagonal of A min-max scaled to [0,1]; a constant diagonal maps to zeros.
std::vector<double> activation_map(const SymmetricAdjacency& adjacency);

struct Connection {
  std::size_t i = 0;
  std::size_t j = 0;
  double weight = 0.0;
};

/// Index pairs (i < j) for the named global pairs in `layout`'s channel order; names missing from the layout are skipped.
std::vector<std::pair<std::size_t, std::size_t>> global_pair_indices(const ElectrodeLayout& layout,
                                                                     const GlobalPairSet& pairs);

/// Off-diagonal pairs ranked by |A_ij| descending, ties by (i, j). Pairs in `excluded` are removed first.
/// Throws ConfigError when k exceeds the number of candidates.
std::vector<Connection> top_k_connections(const SymmetricAdjacency& adjacency, std::size_t k,
                                          std::span<const std::pair<std::size_t, std::size_t>> excluded = {});

}  // namespace rgnn
