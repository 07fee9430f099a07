#include <algorithm>
#include <cmath>
#include <random>

#include "rgnn/data.hpp"
#include "rgnn/errors.hpp"
#include "rgnn/random.hpp"

namespace rgnn {

void SynthConfig::validate() const {
  if (subjects == 0 || trials_per_class == 0 || samples_per_trial == 0)
    throw ConfigError("synth: subjects, trials_per_class and samples_per_trial must be positive");
  if (channels == 0 || bands == 0) throw ConfigError("synth: channels and bands must be positive");
  if (classes < 2) throw ConfigError("synth: at least two classes are required");
  if (!(class_separation >= 0.0) || !std::isfinite(class_separation))
    throw ConfigError("synth: class_separation must be a nonnegative finite number");
  if (!(subject_shift_scale >= 0.0) || !std::isfinite(subject_shift_scale))
    throw ConfigError("synth: subject_shift_scale must be a nonnegative finite number");
  if (!(label_noise_rate >= 0.0 && label_noise_rate <= 1.0)) throw ConfigError("synth: label_noise_rate must be in [0,1]");
}

std::vector<std::size_t> informative_channels(std::size_t channels) {
  const std::size_t block = std::max<std::size_t>(1, (channels + 4) / 5);
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < channels; ++c)
    if (c < block || c + block >= channels) out.push_back(c);
  return out;
}

std::vector<std::pair<double, double>> class_coordinates(LabelScheme scheme, std::size_t classes) {
  switch (scheme) {
    case LabelScheme::seed3:
      return {{-1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}};
    case LabelScheme::seed4:
      // neutral, sad (low valence, low arousal), fear (low valence, high arousal), happy
      return {{0.0, 0.0}, {-1.0, -1.0}, {-1.0, 1.0}, {1.0, 1.0}};
    case LabelScheme::custom:
      break;
  }
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k < classes; ++k) out.emplace_back(static_cast<double>(k) - 0.5 * (classes - 1.0), 0.0);
  return out;
}

std::vector<std::size_t> plausible_confusions(LabelScheme scheme, std::size_t classes, std::size_t label) {
  if (label >= classes) throw ConfigError("plausible_confusions: label out of range");
  switch (scheme) {
    case LabelScheme::seed3: {
      static const std::vector<std::size_t> table[3] = {{1}, {0, 2}, {1}};
      return table[label];
    }
    case LabelScheme::seed4: {
      static const std::vector<std::size_t> table[4] = {{1, 2, 3}, {0, 2}, {0, 1, 3}, {0, 2}};
      return table[label];
    }
    case LabelScheme::custom:
      break;
  }
  std::vector<std::size_t> out;
  if (label > 0) out.push_back(label - 1);
  if (label + 1 < classes) out.push_back(label + 1);
  return out;
}

SynthesisResult synthesize_with_truth(const SynthConfig& cfg) {
  cfg.validate();
  const LabelScheme scheme = cfg.classes == 3 ? LabelScheme::seed3
                             : cfg.classes == 4 ? LabelScheme::seed4
                                                : LabelScheme::custom;
  const std::size_t n = cfg.channels;
  const std::size_t d = cfg.bands;
  const std::size_t stride = n * d;

  // Structure shared by every subject: channel baselines and the class patterns.
  Rng structure(derive_seed(cfg.seed, {streams::kSynth, 0}));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> baseline(stride);
  for (auto& v : baseline) v = gauss(structure);
  std::vector<double> valence_pattern(stride, 0.0), arousal_pattern(stride, 0.0);
  for (std::size_t c : informative_channels(n)) {
    for (std::size_t b = 0; b < d; ++b) {
      valence_pattern[c * d + b] = coin(structure) ? 1.0 : -1.0;
      arousal_pattern[c * d + b] = coin(structure) ? 1.0 : -1.0;
    }
  }
  const auto coords = class_coordinates(scheme, cfg.classes);
  std::vector<std::vector<double>> class_mean(cfg.classes, std::vector<double>(stride));
  for (std::size_t k = 0; k < cfg.classes; ++k)
    for (std::size_t e = 0; e < stride; ++e)
      class_mean[k][e] =
          cfg.class_separation * (coords[k].first * valence_pattern[e] + coords[k].second * arousal_pattern[e]);

  SynthesisResult result;
  FeatureDataset& ds = result.dataset;
  ds.channels = n;
  ds.bands = d;
  ds.classes = cfg.classes;
  ds.scheme = scheme;
  ds.band_names = default_band_names(d);
  const std::size_t trials = cfg.classes * cfg.trials_per_class;
  const std::size_t total = cfg.subjects * trials * cfg.samples_per_trial;
  ds.features.reserve(total * stride);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t s = 0; s < cfg.subjects; ++s) {
    Rng rng(derive_seed(cfg.seed, {streams::kSynth, s + 1}));
    // Persistent per-subject affine distortion: band-wide gain and offset plus a per-channel offset.
    std::vector<double> gain(d), offset(stride);
    for (std::size_t b = 0; b < d; ++b) gain[b] = std::exp(0.25 * cfg.subject_shift_scale * gauss(rng));
    std::vector<double> band_offset(d);
    for (auto& v : band_offset) v = gauss(rng);
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t b = 0; b < d; ++b)
        offset[c * d + b] = cfg.subject_shift_scale * (band_offset[b] + 0.5 * gauss(rng));

    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t label = t % cfg.classes;
      const auto confusions = plausible_confusions(scheme, cfg.classes, label);
      for (std::size_t k = 0; k < cfg.samples_per_trial; ++k) {
        std::size_t source_class = label;
        if (cfg.label_noise_rate > 0.0 && !confusions.empty() && unit(rng) < cfg.label_noise_rate) {
          std::uniform_int_distribution<std::size_t> pick(0, confusions.size() - 1);
          source_class = confusions[pick(rng)];
        }
        for (std::size_t c = 0; c < n; ++c) {
          for (std::size_t b = 0; b < d; ++b) {
            const std::size_t e = c * d + b;
            const double clean = baseline[e] + class_mean[source_class][e] + gauss(rng);
            ds.features.push_back(gain[b] * clean + offset[e]);
          }
        }
        ds.labels.push_back(static_cast<std::int64_t>(label));
        ds.subject_ids.push_back(static_cast<std::int64_t>(s));
        ds.trial_ids.push_back(static_cast<std::int64_t>(t));
        result.generative_classes.push_back(static_cast<std::int64_t>(source_class));
      }
    }
  }
  return result;
}

FeatureDataset synthesize(const SynthConfig& config) { return synthesize_with_truth(config).dataset; }

}  // namespace rgnn
