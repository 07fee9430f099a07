#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rgnn/data.hpp"
#include "rgnn/diffcore.hpp"
#include "rgnn/electrodes.hpp"
#include "rgnn/losses.hpp"
#include "rgnn/model.hpp"
#include "rgnn/optim.hpp"
#include "rgnn/params.hpp"

namespace rgnn {

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 16;
  double alpha = 0.0;
  double epsilon = 0.2;
  bool node_dat = true;
  bool emotion_dl = true;
  bool dat_graph_level = false;
  std::uint64_t seed = 0;
  std::size_t hidden = 32;
  int steps = 2;
  double dropout = 0.7;
  AdamConfig adam;
  /// Fixed GRL scale instead of the progress schedule.
  std::optional<double> beta_override;
  /// Multiplies the scheduled (or overridden) GRL scale.
  double grl_weight = 1.0;
  AdjacencyConfig adjacency;

  void validate() const;
  /// Label smoothing actually used: epsilon when EmotionDL is on, else 0.
  double effective_epsilon() const noexcept { return emotion_dl ? epsilon : 0.0; }
  DomainHead domain_head() const noexcept;
  ModelConfig model_for(const FeatureDataset& train) const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);

struct EpochRecord {
  std::size_t epoch = 0;
  /// Sums over the epoch's batches.
  LossBreakdown loss;
  /// Accuracy of the training-mode predictions made during the epoch.
  double train_accuracy = 0.0;
};

void to_json(nlohmann::json& j, const EpochRecord& r);

struct TrainResult {
  ModelConfig model;
  ParamSet params;
  AdamState optimizer;
  std::vector<EpochRecord> history;
  /// GRL scale used at every batch, in order.
  std::vector<double> beta_trace;
};

/// Adjacency from the configured layout, truncated to the first `channels` electrodes (and the
/// global pairs that survive) when the data has fewer channels than the layout.
SymmetricAdjacency initial_adjacency(const AdjacencyConfig& config, const FeatureDataset& train);

/// KL targets for every sample under the dataset's label scheme.
std::vector<LabelDistribution> label_targets(const FeatureDataset& ds, double epsilon);

/// Full training loop. The target is required (and only used) when a domain head is on.
TrainResult train(const FeatureDataset& train_ds, const UnlabeledDataset* target, const TrainConfig& config);

/// Same loop from explicit initial parameters.
TrainResult train_from(ParamSet initial, const FeatureDataset& train_ds, const UnlabeledDataset* target,
                       const TrainConfig& config);

}  // namespace rgnn
