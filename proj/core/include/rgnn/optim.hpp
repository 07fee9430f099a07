#pragma once

#include <cstdint>

#include "rgnn/params.hpp"

namespace rgnn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// Decoupled decay on W, W^O and W^D. The adjacency is never decayed.
  double weight_decay = 0.0;

  void validate() const;
};

struct AdamState {
  std::uint64_t step = 0;
  ParamSet first_moment;
  ParamSet second_moment;

  static AdamState zeros_for(const ParamSet& params);
};

/// One bias-corrected Adam update using `directions` as the gradient.
/// Throws NumericError naming the tensor if a direction is not finite.
void adam_step(AdamState& state, ParamSet& params, const ParamSet& directions, const AdamConfig& config);

}  // namespace rgnn
