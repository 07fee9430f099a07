#include "rgnn/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <nlohmann/json.hpp>

#include "rgnn/errors.hpp"
#include "rgnn/random.hpp"

namespace rgnn {

void TrainConfig::validate() const {
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be nonnegative");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must be in [0,1]");
  if (node_dat && dat_graph_level) throw ConfigError("node_dat and dat_graph_level are mutually exclusive");
  if (hidden == 0) throw ConfigError("hidden must be positive");
  if (steps < 0) throw ConfigError("steps must be nonnegative");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0,1)");
  if (beta_override && !std::isfinite(*beta_override)) throw ConfigError("beta_override must be finite");
  if (!(grl_weight >= 0.0) || !std::isfinite(grl_weight)) throw ConfigError("grl_weight must be a nonnegative finite number");
  adam.validate();
}

DomainHead TrainConfig::domain_head() const noexcept {
  if (node_dat) return DomainHead::node;
  if (dat_graph_level) return DomainHead::graph;
  return DomainHead::none;
}

ModelConfig TrainConfig::model_for(const FeatureDataset& train) const {
  ModelConfig m;
  m.channels = train.channels;
  m.bands = train.bands;
  m.hidden = hidden;
  m.classes = train.classes;
  m.steps = steps;
  m.dropout = dropout;
  m.validate();
  return m;
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"epochs", c.epochs},
       {"batch_size", c.batch_size},
       {"alpha", c.alpha},
       {"epsilon", c.epsilon},
       {"node_dat", c.node_dat},
       {"emotion_dl", c.emotion_dl},
       {"dat_graph_level", c.dat_graph_level},
       {"seed", c.seed},
       {"hidden", c.hidden},
       {"steps", c.steps},
       {"dropout", c.dropout},
       {"grl_weight", c.grl_weight},
       {"lr", c.adam.lr},
       {"beta1", c.adam.beta1},
       {"beta2", c.adam.beta2},
       {"adam_eps", c.adam.eps},
       {"weight_decay", c.adam.weight_decay}};
  if (c.beta_override) j["beta_override"] = *c.beta_override;
}

void to_json(nlohmann::json& j, const EpochRecord& r) {
  j = {{"epoch", r.epoch},
       {"kl", r.loss.kl},
       {"l1", r.loss.l1},
       {"domain", r.loss.domain},
       {"total", r.loss.total},
       {"train_accuracy", r.train_accuracy}};
}

SymmetricAdjacency initial_adjacency(const AdjacencyConfig& config, const FeatureDataset& train) {
  if (config.layout.size() < train.channels)
    throw ConfigError("layout has " + std::to_string(config.layout.size()) + " electrodes but data has " +
                      std::to_string(train.channels) + " channels");
  AdjacencyConfig prefixed = config;
  if (config.layout.size() > train.channels) prefixed.layout = layout_prefix(config.layout, train.channels);
  // Pairs touching electrodes outside a truncated layout are dropped.
  prefixed.global_pairs = config.global_pairs.restricted_to(prefixed.layout);
  return build_initial_adjacency(prefixed, train);
}

std::vector<LabelDistribution> label_targets(const FeatureDataset& ds, double epsilon) {
  std::vector<LabelDistribution> out;
  out.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.labels[i] < 0) throw ConfigError("negative label at sample " + std::to_string(i));
    out.push_back(convert_label(ds.scheme, ds.classes, static_cast<std::size_t>(ds.labels[i]), epsilon));
  }
  return out;
}

TrainResult train(const FeatureDataset& train_ds, const UnlabeledDataset* target, const TrainConfig& config) {
  config.validate();
  const ModelConfig model = config.model_for(train_ds);
  return train_from(xavier_init(model, config.seed, initial_adjacency(config.adjacency, train_ds)), train_ds,
                    target, config);
}

TrainResult train_from(ParamSet initial, const FeatureDataset& train_ds, const UnlabeledDataset* target,
                       const TrainConfig& config) {
  config.validate();
  train_ds.validate();
  if (train_ds.size() == 0) throw ConfigError("training set is empty");
  const DomainHead head = config.domain_head();
  if (head != DomainHead::none) {
    if (target == nullptr || target->size() == 0)
      throw ConfigError("domain adversarial training needs unlabeled target data");
    if (target->channels != train_ds.channels || target->bands != train_ds.bands)
      throw ConfigError("target data shape differs from the training data");
  }

  TrainResult result;
  result.model = config.model_for(train_ds);
  result.params = std::move(initial);
  result.params.require_same_shape(xavier_init(result.model, 0));
  result.optimizer = AdamState::zeros_for(result.params);

  const std::size_t n = train_ds.size();
  const std::size_t batches_per_epoch = (n + config.batch_size - 1) / config.batch_size;
  const std::size_t total_batches = batches_per_epoch * config.epochs;
  const std::vector<LabelDistribution> targets = label_targets(train_ds, config.effective_epsilon());

  std::vector<Matrix> source_samples(n);
  for (std::size_t i = 0; i < n; ++i) source_samples[i] = train_ds.sample(i);

  LossSpec spec;
  spec.alpha = config.alpha;
  spec.domain = head;
  spec.training = true;

  std::size_t global_batch = 0;
  std::vector<std::size_t> order(n);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng(derive_seed(config.seed, {streams::kShuffle, epoch}));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    std::vector<std::size_t> target_order;
    if (head != DomainHead::none)
      target_order = resample_indices(n, target->size(), derive_seed(config.seed, {streams::kTarget, epoch}));

    EpochRecord record;
    record.epoch = epoch;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size, ++global_batch) {
      const std::size_t stop = std::min(n, start + config.batch_size);
      Batch batch;
      for (std::size_t k = start; k < stop; ++k) {
        batch.source.push_back(source_samples[order[k]]);
        batch.targets.push_back(targets[order[k]]);
        batch.dropout_seeds.push_back(derive_seed(config.seed, {streams::kDropout, global_batch, k - start}));
        if (head != DomainHead::none) batch.target_domain.push_back(target->sample(target_order[k]));
      }

      const LossEvaluation eval = evaluate_batch(result.params, result.model, batch, spec, true);
      if (!std::isfinite(eval.loss.total))
        throw NumericError("non-finite loss at batch " + std::to_string(global_batch) + " (epoch " +
                           std::to_string(epoch) + ")");

      const double beta = config.grl_weight * (config.beta_override
                                                   ? *config.beta_override
                                                   : grl_beta(training_progress(global_batch, total_batches)));
      result.beta_trace.push_back(beta);
      const ParamSet directions = composite_gradients(eval.task_gradients, eval.domain_gradients, beta);
      adam_step(result.optimizer, result.params, directions, config.adam);

      record.loss.kl += eval.loss.kl;
      record.loss.l1 += eval.loss.l1;
      record.loss.domain += eval.loss.domain;
      record.loss.total += eval.loss.total;
      for (std::size_t k = start; k < stop; ++k) {
        const Vector& p = eval.class_probs[k - start];
        Eigen::Index best = 0;
        for (Eigen::Index c = 1; c < p.size(); ++c)
          if (p(c) > p(best)) best = c;
        if (best == train_ds.labels[order[k]]) ++correct;
      }
    }
    record.train_accuracy = static_cast<double>(correct) / static_cast<double>(n);
    result.history.push_back(record);
  }
  return result;
}

}  // namespace rgnn
