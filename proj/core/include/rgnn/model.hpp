#pragma once

#include <cstddef>
#include <cstdint>

#include <nlohmann/json_fwd.hpp>

#include "rgnn/graph.hpp"
#include "rgnn/linalg.hpp"
#include "rgnn/params.hpp"

namespace rgnn {

struct ModelConfig {
  std::size_t channels = 62;
  std::size_t bands = 5;
  std::size_t hidden = 32;
  std::size_t classes = 3;
  int steps = 2;
  double dropout = 0.7;

  void validate() const;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

/// Xavier-uniform W, W^O, W^D from `seed`; the adjacency is supplied by the caller
/// (identity when omitted).
ParamSet xavier_init(const ModelConfig& config, std::uint64_t seed);
ParamSet xavier_init(const ModelConfig& config, std::uint64_t seed, SymmetricAdjacency adjacency);

struct ForwardTrace {
  Matrix z;            // n x d' node representations S^L X W
  Vector pooled;       // d', sum over nodes of ReLU(Z)
  Vector class_logits; // C
  Vector class_probs;  // C
};

/// Inverted-dropout keep mask for the pooled vector, derived from a per-sample seed.
Vector dropout_mask(std::size_t units, double rate, std::uint64_t sample_seed);

/// Dropout applies to the pooled vector only when `training` is set.
ForwardTrace forward(const ParamSet& params, const NormalizedPropagator& propagator, const Matrix& x,
                     const ModelConfig& config, bool training = false, std::uint64_t sample_seed = 0);

/// Per-node softmax(ReLU(Z_j) W^D); column 0 is the source domain, column 1 the target.
struct DomainProbabilities {
  Matrix source;  // n x 2
  Matrix target;  // n x 2
};

DomainProbabilities domain_forward(const ParamSet& params, const Matrix& z_source, const Matrix& z_target);

/// Row-wise softmax with max subtraction; also returns log-probabilities when asked.
Matrix softmax_rows(const Matrix& logits, Matrix* log_probs = nullptr);
Vector softmax(const Vector& logits, Vector* log_probs = nullptr);

}  // namespace rgnn
