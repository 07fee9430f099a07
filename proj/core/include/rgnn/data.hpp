#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rgnn/linalg.hpp"

namespace rgnn {

/// seed3: negative / neutral / positive. seed4: neutral / sad / fear / happy.
enum class LabelScheme { seed3, seed4, custom };

std::string_view to_string(LabelScheme scheme) noexcept;
LabelScheme parse_label_scheme(std::string_view name);
/// Class count implied by the scheme, or nullopt for custom.
std::optional<std::size_t> scheme_classes(LabelScheme scheme) noexcept;

/// Band-feature samples. Features are stored row-major as [sample][channel][band].
struct FeatureDataset {
  std::size_t channels = 0;
  std::size_t bands = 0;
  std::size_t classes = 0;
  LabelScheme scheme = LabelScheme::custom;
  std::vector<std::string> band_names;
  std::vector<double> features;
  std::vector<std::int64_t> labels;
  std::vector<std::int64_t> subject_ids;
  std::vector<std::int64_t> trial_ids;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t sample_stride() const noexcept { return channels * bands; }
  std::span<const double> sample_span(std::size_t i) const {
    return {features.data() + i * sample_stride(), sample_stride()};
  }
  /// channels x bands copy of sample i.
  Matrix sample(std::size_t i) const;

  /// Throws ConfigError when array lengths, labels or trial grouping are inconsistent.
  void validate() const;
};

/// Features without labels; the only view of a target domain training ever receives.
struct UnlabeledDataset {
  std::size_t channels = 0;
  std::size_t bands = 0;
  std::vector<double> features;

  std::size_t size() const noexcept { return channels * bands == 0 ? 0 : features.size() / (channels * bands); }
  std::size_t sample_stride() const noexcept { return channels * bands; }
  std::span<const double> sample_span(std::size_t i) const {
    return {features.data() + i * sample_stride(), sample_stride()};
  }
  Matrix sample(std::size_t i) const;
};

UnlabeledDataset strip_labels(const FeatureDataset& ds);

/// Samples at `indices`, in that order.
FeatureDataset subset(const FeatureDataset& ds, std::span<const std::size_t> indices);

std::vector<std::string> default_band_names(std::size_t bands);

/// Directory bundle: manifest.json, features.f32 (LE f32), labels.i64 (LE i64).
void save_dataset(const FeatureDataset& ds, const std::filesystem::path& dir);
FeatureDataset load_dataset(const std::filesystem::path& dir);

struct SynthConfig {
  std::size_t subjects = 8;
  std::size_t trials_per_class = 3;
  std::size_t samples_per_trial = 20;
  std::size_t channels = 62;
  std::size_t bands = 5;
  std::size_t classes = 3;
  double class_separation = 1.0;
  double subject_shift_scale = 0.0;
  double label_noise_rate = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Channels whose class means differ: a frontal block and an occipital block in layout order.
std::vector<std::size_t> informative_channels(std::size_t channels);

/// Class coordinates on the valence/arousal plane used by the generator.
std::vector<std::pair<double, double>> class_coordinates(LabelScheme scheme, std::size_t classes);

/// Classes a noisy label may flip to: those with nonzero mass in the true class's label distribution.
std::vector<std::size_t> plausible_confusions(LabelScheme scheme, std::size_t classes, std::size_t label);

/// Deterministic synthetic cross-subject band features. Trials cycle through the classes,
/// so any prefix of C consecutive trials covers every class.
FeatureDataset synthesize(const SynthConfig& config);

struct SynthesisResult {
  FeatureDataset dataset;
  /// Class each sample's features were drawn from; differs from the label for noisy samples.
  std::vector<std::int64_t> generative_classes;
};

SynthesisResult synthesize_with_truth(const SynthConfig& config);

struct Split {
  std::int64_t subject = 0;
  FeatureDataset train;
  FeatureDataset test;
};

/// Per subject: the first `train_trials` trials (by trial id) train, the remainder test.
std::vector<Split> split_subject_dependent(const FeatureDataset& ds, std::size_t train_trials);

/// One fold per subject, ordered by subject id.
std::vector<Split> split_loso(const FeatureDataset& ds);

FeatureDataset band_select(const FeatureDataset& ds, std::span<const std::string> bands);

/// Indices drawn from [0, target_n) to produce exactly source_n samples: a permutation when the
/// sizes match, subsampling without replacement when shrinking, sampling with replacement when growing.
std::vector<std::size_t> resample_indices(std::size_t source_n, std::size_t target_n, std::uint64_t seed);

FeatureDataset resample_target(std::size_t source_n, const FeatureDataset& target, std::uint64_t seed);
UnlabeledDataset resample_target(std::size_t source_n, const UnlabeledDataset& target, std::uint64_t seed);

}  // namespace rgnn
