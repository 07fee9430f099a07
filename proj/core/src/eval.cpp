#include "rgnn/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "rgnn/errors.hpp"

namespace rgnn {

std::size_t predict_class(const Vector& probs) {
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < probs.size(); ++c)
    if (probs(c) > probs(best)) best = c;
  return static_cast<std::size_t>(best);
}

Evaluation evaluate(const ParamSet& params, const ModelConfig& model, const FeatureDataset& test) {
  if (test.channels != model.channels || test.bands != model.bands)
    throw ShapeError("test data shape differs from the model");
  const NormalizedPropagator propagator = normalize(params.adjacency);
  Evaluation out;
  out.confusion.assign(model.classes, std::vector<std::size_t>(model.classes, 0));
  out.predictions.reserve(test.size());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const ForwardTrace trace = forward(params, propagator, test.sample(i), model, false);
    const std::size_t predicted = predict_class(trace.class_probs);
    const auto truth = static_cast<std::size_t>(test.labels[i]);
    if (truth >= model.classes) throw ConfigError("test label out of range at sample " + std::to_string(i));
    ++out.confusion[truth][predicted];
    if (predicted == truth) ++correct;
    out.predictions.push_back(predicted);
  }
  out.accuracy = test.size() == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(test.size());
  return out;
}

std::string_view to_string(Protocol protocol) noexcept {
  return protocol == Protocol::loso ? "loso" : "subject_dependent";
}

Protocol parse_protocol(std::string_view name) {
  if (name == "loso") return Protocol::loso;
  if (name == "subject_dependent") return Protocol::subject_dependent;
  throw ConfigError("unknown protocol '" + std::string(name) + "' (expected subject_dependent or loso)");
}

void to_json(nlohmann::json& j, const ProtocolConfig& c) {
  j = {{"protocol", to_string(c.protocol)}, {"train", c.train}};
  if (c.protocol == Protocol::subject_dependent) j["train_trials"] = c.train_trials;
}

namespace {

std::vector<TrialKey> groups_of(const FeatureDataset& ds) {
  std::set<TrialKey> keys;
  for (std::size_t i = 0; i < ds.size(); ++i) keys.emplace(ds.subject_ids[i], ds.trial_ids[i]);
  return {keys.begin(), keys.end()};
}

FoldResult run_fold(const Split& split, const TrainConfig& config) {
  FoldResult fold;
  fold.subject = split.subject;
  fold.train_groups = groups_of(split.train);
  fold.test_groups = groups_of(split.test);
  const UnlabeledDataset target = strip_labels(split.test);
  const bool wants_target = config.domain_head() != DomainHead::none;
  fold.trained = train(split.train, wants_target ? &target : nullptr, config);
  const Evaluation eval = evaluate(fold.trained.params, fold.trained.model, split.test);
  fold.accuracy = eval.accuracy;
  fold.test_size = split.test.size();
  fold.confusion = eval.confusion;
  return fold;
}

}  // namespace

EvalReport run_protocol(const FeatureDataset& ds, const ProtocolConfig& config,
                        const std::function<void(const FoldResult&)>& on_fold) {
  config.train.validate();
  if (config.jobs == 0) throw ConfigError("jobs must be positive");
  const std::vector<Split> splits = config.protocol == Protocol::loso
                                        ? split_loso(ds)
                                        : split_subject_dependent(ds, config.train_trials);

  EvalReport report;
  report.config = config;
  report.folds.resize(splits.size());
  std::vector<std::exception_ptr> errors(splits.size());
  std::atomic<std::size_t> next{0};
  std::mutex callback_lock;

  auto worker = [&] {
    for (std::size_t f = next++; f < splits.size(); f = next++) {
      try {
        report.folds[f] = run_fold(splits[f], config.train);
        if (on_fold) {
          std::lock_guard lock(callback_lock);
          on_fold(report.folds[f]);
        }
      } catch (...) {
        errors[f] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(config.jobs, splits.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  const std::size_t classes = ds.classes;
  report.confusion.assign(classes, std::vector<std::size_t>(classes, 0));
  double sum = 0.0;
  for (const auto& fold : report.folds) {
    sum += fold.accuracy;
    for (std::size_t r = 0; r < classes; ++r)
      for (std::size_t c = 0; c < classes; ++c) report.confusion[r][c] += fold.confusion[r][c];
  }
  const double k = static_cast<double>(report.folds.size());
  report.mean = sum / k;
  double var = 0.0;
  for (const auto& fold : report.folds) var += (fold.accuracy - report.mean) * (fold.accuracy - report.mean);
  report.std = std::sqrt(var / k);
  return report;
}

nlohmann::json report_json(const EvalReport& report) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : report.folds)
    folds.push_back({{"subject", f.subject}, {"accuracy", f.accuracy}, {"test_size", f.test_size}});
  return {{"folds", folds},
          {"mean", report.mean},
          {"std", report.std},
          {"confusion", report.confusion},
          {"config", report.config}};
}

std::vector<double> activation_map(const SymmetricAdjacency& adjacency) {
  const std::size_t n = adjacency.size();
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = adjacency(i, i);
  if (n == 0) return diag;
  const auto [lo, hi] = std::minmax_element(diag.begin(), diag.end());
  const double min = *lo;
  const double range = *hi - *lo;
  // Sub-rounding spreads (e.g. an untrained matrix) map to all zeros.
  const bool flat = range <= 1e-9 * std::max(1.0, std::abs(*hi));
  for (double& v : diag) v = flat ? 0.0 : (v - min) / range;
  return diag;
}

std::vector<std::pair<std::size_t, std::size_t>> global_pair_indices(const ElectrodeLayout& layout,
                                                                     const GlobalPairSet& pairs) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& [a, b] : pairs.pairs) {
    const auto ia = std::find(layout.names.begin(), layout.names.end(), a);
    const auto ib = std::find(layout.names.begin(), layout.names.end(), b);
    if (ia == layout.names.end() || ib == layout.names.end()) continue;
    const auto x = static_cast<std::size_t>(ia - layout.names.begin());
    const auto y = static_cast<std::size_t>(ib - layout.names.begin());
    out.emplace_back(std::min(x, y), std::max(x, y));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Connection> top_k_connections(const SymmetricAdjacency& adjacency, std::size_t k,
                                          std::span<const std::pair<std::size_t, std::size_t>> excluded) {
  const std::set<std::pair<std::size_t, std::size_t>> skip = [&] {
    std::set<std::pair<std::size_t, std::size_t>> s;
    for (const auto& [a, b] : excluded) s.emplace(std::min(a, b), std::max(a, b));
    return s;
  }();
  const std::size_t n = adjacency.size();
  std::vector<Connection> candidates;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!skip.count({i, j})) candidates.push_back({i, j, adjacency(i, j)});
  if (k > candidates.size())
    throw ConfigError("top-k of " + std::to_string(k) + " exceeds " + std::to_string(candidates.size()) +
                      " candidate pairs");
  std::stable_sort(candidates.begin(), candidates.end(), [](const Connection& a, const Connection& b) {
    return std::abs(a.weight) > std::abs(b.weight);
  });
  candidates.resize(k);
  return candidates;
}

}  // namespace rgnn
