#include "rgnn/model.hpp"

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "rgnn/errors.hpp"
#include "rgnn/random.hpp"

namespace rgnn {

void ModelConfig::validate() const {
  if (channels == 0 || bands == 0 || hidden == 0) throw ConfigError("model: channels, bands and hidden must be positive");
  if (classes < 2) throw ConfigError("model: at least two classes are required");
  if (steps < 1) throw ConfigError("model: steps (L) must be at least 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("model: dropout must be in [0,1)");
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = {{"channels", c.channels}, {"bands", c.bands},  {"hidden", c.hidden},
       {"classes", c.classes},   {"steps", c.steps},  {"dropout", c.dropout}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  j.at("channels").get_to(c.channels);
  j.at("bands").get_to(c.bands);
  j.at("hidden").get_to(c.hidden);
  j.at("classes").get_to(c.classes);
  j.at("steps").get_to(c.steps);
  j.at("dropout").get_to(c.dropout);
}

namespace {

Matrix xavier_uniform(Eigen::Index fan_in, Eigen::Index fan_out, std::uint64_t seed) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Rng rng(seed);
  Matrix m(fan_in, fan_out);
  for (Eigen::Index i = 0; i < fan_in; ++i)
    for (Eigen::Index j = 0; j < fan_out; ++j) m(i, j) = (2.0 * to_unit_interval(rng()) - 1.0) * bound;
  return m;
}

}  // namespace

ParamSet xavier_init(const ModelConfig& config, std::uint64_t seed) {
  return xavier_init(config, seed, SymmetricAdjacency::identity(config.channels));
}

ParamSet xavier_init(const ModelConfig& config, std::uint64_t seed, SymmetricAdjacency adjacency) {
  config.validate();
  if (adjacency.size() != config.channels)
    throw ShapeError("adjacency has " + std::to_string(adjacency.size()) + " nodes, model expects " +
                     std::to_string(config.channels));
  const auto d = static_cast<Eigen::Index>(config.bands);
  const auto h = static_cast<Eigen::Index>(config.hidden);
  const auto c = static_cast<Eigen::Index>(config.classes);
  ParamSet p;
  p.adjacency = std::move(adjacency);
  p.w = xavier_uniform(d, h, derive_seed(seed, {streams::kInit, 1}));
  p.w_out = xavier_uniform(h, c, derive_seed(seed, {streams::kInit, 2}));
  p.w_domain = xavier_uniform(h, 2, derive_seed(seed, {streams::kInit, 3}));
  return p;
}

Vector dropout_mask(std::size_t units, double rate, std::uint64_t sample_seed) {
  Vector mask = Vector::Ones(static_cast<Eigen::Index>(units));
  if (rate <= 0.0) return mask;
  const double keep_scale = 1.0 / (1.0 - rate);
  for (std::size_t k = 0; k < units; ++k) {
    const double u = to_unit_interval(derive_seed(sample_seed, {streams::kDropout, k}));
    mask(static_cast<Eigen::Index>(k)) = u < rate ? 0.0 : keep_scale;
  }
  return mask;
}

Matrix softmax_rows(const Matrix& logits, Matrix* log_probs) {
  const Vector row_max = logits.rowwise().maxCoeff();
  Matrix shifted = logits.colwise() - row_max;
  Matrix e = shifted.array().exp();
  const Vector sums = e.rowwise().sum();
  if (log_probs) *log_probs = shifted.colwise() - Vector(sums.array().log());
  return e.array().colwise() / sums.array();
}

Vector softmax(const Vector& logits, Vector* log_probs) {
  const double m = logits.maxCoeff();
  const Vector shifted = logits.array() - m;
  const Vector e = shifted.array().exp();
  const double sum = e.sum();
  if (log_probs) *log_probs = shifted.array() - std::log(sum);
  return e / sum;
}

ForwardTrace forward(const ParamSet& params, const NormalizedPropagator& propagator, const Matrix& x,
                     const ModelConfig& config, bool training, std::uint64_t sample_seed) {
  if (x.rows() != propagator.s.rows() || x.cols() != params.w.rows())
    throw ShapeError("forward: X is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) + ", expected " +
                     std::to_string(propagator.s.rows()) + "x" + std::to_string(params.w.rows()));
  if (params.w_out.rows() != params.w.cols()) throw ShapeError("forward: W^O fan-in differs from hidden size");
  ForwardTrace t;
  t.z = propagate(propagator, x, config.steps) * params.w;
  t.pooled = t.z.cwiseMax(0.0).colwise().sum().transpose();
  Vector h = t.pooled;
  if (training) h = h.cwiseProduct(dropout_mask(static_cast<std::size_t>(h.size()), config.dropout, sample_seed));
  t.class_logits = params.w_out.transpose() * h;
  t.class_probs = softmax(t.class_logits);
  return t;
}

DomainProbabilities domain_forward(const ParamSet& params, const Matrix& z_source, const Matrix& z_target) {
  if (z_source.cols() != params.w_domain.rows() || z_target.cols() != params.w_domain.rows())
    throw ShapeError("domain_forward: node representation width differs from W^D fan-in");
  if (z_source.rows() != z_target.rows()) throw ShapeError("domain_forward: source and target node counts differ");
  return {softmax_rows(z_source.cwiseMax(0.0) * params.w_domain),
          softmax_rows(z_target.cwiseMax(0.0) * params.w_domain)};
}

}  // namespace rgnn
