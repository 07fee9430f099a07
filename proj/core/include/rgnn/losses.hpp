#pragma once

#include <cstddef>
#include <span>

#include "rgnn/data.hpp"
#include "rgnn/graph.hpp"
#include "rgnn/linalg.hpp"
#include "rgnn/params.hpp"

namespace rgnn {

/// Length-C class distribution that replaces a hard label.
using LabelDistribution = Vector;

/// Three-class conversion: negative (0), neutral (1), positive (2). Opposite classes get zero mass.
LabelDistribution convert_labels_seed(std::size_t label, double epsilon);

/// Four-class conversion: neutral (0), sad (1), fear (2), happy (3). Sad and happy exclude each other.
LabelDistribution convert_labels_seed4(std::size_t label, double epsilon);

/// Dispatches on the scheme. Custom schemes only support epsilon = 0 (one-hot).
LabelDistribution convert_label(LabelScheme scheme, std::size_t classes, std::size_t label, double epsilon);

/// sum_i KL(target_i || pred_i), with 0 log 0 = 0.
double kl_loss(std::span<const Vector> predictions, std::span<const LabelDistribution> targets);

/// alpha * sum over the full matrix of |A_ij| (off-diagonal entries count twice).
double l1_penalty(const SymmetricAdjacency& adjacency, double alpha);

/// -sum_i sum_j [log p_j(0 | source_i) + log p_j(1 | target_i)] over n x 2 per-sample probability tables.
/// Graph-level tables are 1 x 2.
double domain_loss(std::span<const Matrix> source_probs, std::span<const Matrix> target_probs);

/// GRL scale 2 / (1 + exp(-10 p)) - 1 for training progress p in [0,1].
double grl_beta(double progress);

/// Completed batches over total batches, clamped to [0,1].
double training_progress(std::size_t completed_batches, std::size_t total_batches) noexcept;

struct LossBreakdown {
  double kl = 0.0;
  double l1 = 0.0;
  double domain = 0.0;
  double total = 0.0;
};

/// Update directions: W^D descends the domain loss, W^O descends the task loss, and the shared
/// W and A take task gradient minus beta times domain gradient.
ParamSet composite_gradients(const ParamSet& task_gradients, const ParamSet& domain_gradients, double beta);

}  // namespace rgnn
