#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rgnn/linalg.hpp"
#include "rgnn/losses.hpp"
#include "rgnn/model.hpp"
#include "rgnn/params.hpp"

namespace rgnn {

enum class DomainHead {
  none,   // no domain loss
  node,   // one source/target classifier per node representation
  graph,  // one classifier on the pooled graph representation
};

/// One minibatch for the composite objective. Target samples are unlabeled and only feed the domain loss.
struct Batch {
  std::vector<Matrix> source;                  // n x d each
  std::vector<LabelDistribution> targets;      // one per source sample
  std::vector<Matrix> target_domain;           // n x d each; must match source count when a domain head is on
  std::vector<std::uint64_t> dropout_seeds;    // one per source sample; used only when training
};

struct LossSpec {
  double alpha = 0.0;
  DomainHead domain = DomainHead::none;
  bool training = false;
  /// Test hook: drops the degree-normalization term from the adjacency adjoint.
  bool corrupt_degree_adjoint = false;
};

struct LossEvaluation {
  LossBreakdown loss;
  /// Gradients of KL + L1 (the task objective).
  ParamSet task_gradients;
  /// Gradients of the domain loss; zero when no domain head is active.
  ParamSet domain_gradients;
  std::vector<Vector> class_probs;
};

/// Forward pass over the batch and, when `with_gradients`, exact reverse-mode gradients of the
/// task and domain objectives with respect to every parameter (the propagator is rebuilt from A,
/// so adjacency gradients flow through the degree normalization).
LossEvaluation evaluate_batch(const ParamSet& params, const ModelConfig& config, const Batch& batch,
                              const LossSpec& spec, bool with_gradients = true);

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_tensor;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

/// Central differences (loss(p+h) - loss(p-h)) / 2h for every scalar parameter, compared to
/// `analytic` with relative error |a - f| / max(1e-8, |a| + |f|).
GradCheckReport grad_check(const ParamSet& params, const ParamSet& analytic,
                           const std::function<double(const ParamSet&)>& loss, double h = 1e-5);

/// A random full-model instance with every regularizer active (L1, label distributions, node-wise
/// domain head, frozen dropout) and no ReLU pre-activation within 10h of zero.
struct GradCheckSetup {
  ModelConfig config;
  ParamSet params;
  Batch batch;
  LossSpec spec;
  double beta = 0.5;
};

GradCheckSetup random_gradcheck_setup(const ModelConfig& config, std::size_t batch_size, std::uint64_t seed,
                                      double h = 1e-5);

struct CompositeGradCheck {
  GradCheckReport task;       // KL + L1
  GradCheckReport domain;     // domain loss
  GradCheckReport composite;  // task - beta * domain on the shared parameters
  double max_relative_error = 0.0;
};

CompositeGradCheck check_composite_gradients(const GradCheckSetup& setup, double h = 1e-5);

}  // namespace rgnn
