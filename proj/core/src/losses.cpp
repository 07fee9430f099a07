#include "rgnn/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rgnn/errors.hpp"

namespace rgnn {

namespace {

void require_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must be in [0,1]");
}

}  // namespace

LabelDistribution convert_labels_seed(std::size_t label, double epsilon) {
  require_epsilon(epsilon);
  const double side = 2 * epsilon / 3;
  const double centre = 1 - 2 * epsilon / 3;
  LabelDistribution y(3);
  switch (label) {
    case 0:
      y << centre, side, 0.0;
      break;
    case 1:
      y << epsilon / 3, centre, epsilon / 3;
      break;
    case 2:
      y << 0.0, side, centre;
      break;
    default:
      throw ConfigError("seed3 label " + std::to_string(label) + " out of range");
  }
  return y;
}

LabelDistribution convert_labels_seed4(std::size_t label, double epsilon) {
  require_epsilon(epsilon);
  const double quarter = epsilon / 4;
  const double third = epsilon / 3;
  const double wide = 1 - 3 * epsilon / 4;
  const double narrow = 1 - 2 * epsilon / 3;
  LabelDistribution y(4);
  switch (label) {
    case 0:
      y << wide, quarter, quarter, quarter;
      break;
    case 1:
      y << third, narrow, third, 0.0;
      break;
    case 2:
      y << quarter, quarter, wide, quarter;
      break;
    case 3:
      y << third, 0.0, third, narrow;
      break;
    default:
      throw ConfigError("seed4 label " + std::to_string(label) + " out of range");
  }
  return y;
}

LabelDistribution convert_label(LabelScheme scheme, std::size_t classes, std::size_t label, double epsilon) {
  switch (scheme) {
    case LabelScheme::seed3:
      return convert_labels_seed(label, epsilon);
    case LabelScheme::seed4:
      return convert_labels_seed4(label, epsilon);
    case LabelScheme::custom:
      break;
  }
  if (label >= classes) throw ConfigError("label " + std::to_string(label) + " out of range");
  if (epsilon != 0.0) throw ConfigError("label distribution learning needs the seed3 or seed4 scheme");
  LabelDistribution y = LabelDistribution::Zero(static_cast<Eigen::Index>(classes));
  y(static_cast<Eigen::Index>(label)) = 1.0;
  return y;
}

double kl_loss(std::span<const Vector> predictions, std::span<const LabelDistribution> targets) {
  if (predictions.size() != targets.size()) throw ShapeError("kl_loss: batch size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const Vector& p = predictions[i];
    const Vector& y = targets[i];
    if (p.size() != y.size()) throw ShapeError("kl_loss: class count mismatch");
    for (Eigen::Index c = 0; c < y.size(); ++c)
      if (y(c) > 0.0) total += y(c) * (std::log(y(c)) - std::log(p(c)));
  }
  return total;
}

double l1_penalty(const SymmetricAdjacency& adjacency, double alpha) {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be nonnegative");
  double sum = 0.0;
  const std::size_t n = adjacency.size();
  for (std::size_t i = 0; i < n; ++i) {
    sum += std::abs(adjacency(i, i));
    for (std::size_t j = i + 1; j < n; ++j) sum += 2.0 * std::abs(adjacency(i, j));
  }
  return alpha * sum;
}

double domain_loss(std::span<const Matrix> source_probs, std::span<const Matrix> target_probs) {
  if (source_probs.size() != target_probs.size())
    throw ShapeError("domain_loss: " + std::to_string(source_probs.size()) + " source vs " +
                     std::to_string(target_probs.size()) + " target samples; resample the target first");
  double total = 0.0;
  for (std::size_t i = 0; i < source_probs.size(); ++i) {
    if (source_probs[i].cols() != 2 || target_probs[i].cols() != 2) throw ShapeError("domain_loss: expected n x 2");
    total -= source_probs[i].col(0).array().log().sum();
    total -= target_probs[i].col(1).array().log().sum();
  }
  return total;
}

double grl_beta(double progress) {
  const double p = std::clamp(progress, 0.0, 1.0);
  return 2.0 / (1.0 + std::exp(-10.0 * p)) - 1.0;
}

double training_progress(std::size_t completed_batches, std::size_t total_batches) noexcept {
  if (total_batches == 0) return 0.0;
  return std::min(1.0, static_cast<double>(completed_batches) / static_cast<double>(total_batches));
}

ParamSet composite_gradients(const ParamSet& task, const ParamSet& domain, double beta) {
  task.require_same_shape(domain);
  ParamSet out = task;
  auto a = out.adjacency.upper();
  auto g = domain.adjacency.upper();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = a[i] - beta * g[i];
  out.w = task.w - beta * domain.w;
  out.w_out = task.w_out;
  out.w_domain = domain.w_domain;
  return out;
}

}  // namespace rgnn
