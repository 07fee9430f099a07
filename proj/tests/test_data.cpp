#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "rgnn/data.hpp"
#include "rgnn/errors.hpp"

using namespace rgnn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rgnn_test_data_" + name);
  fs::remove_all(p);
  return p;
}

SynthConfig tiny_synth(std::uint64_t seed = 1) {
  SynthConfig c;
  c.subjects = 3;
  c.trials_per_class = 2;
  c.samples_per_trial = 4;
  c.channels = 6;
  c.bands = 5;
  c.classes = 3;
  c.subject_shift_scale = 0.5;
  c.label_noise_rate = 0.2;
  c.seed = seed;
  return c;
}

std::vector<double> flat(const FeatureDataset& ds, std::size_t i) {
  const auto s = ds.sample_span(i);
  return {s.begin(), s.end()};
}

}  // namespace

TEST(Bundle, RoundTripWithinFloatQuantization) {
  const FeatureDataset ds = synthesize(tiny_synth());
  const fs::path dir = scratch("roundtrip");
  save_dataset(ds, dir);
  const FeatureDataset back = load_dataset(dir);
  EXPECT_EQ(back.channels, ds.channels);
  EXPECT_EQ(back.bands, ds.bands);
  EXPECT_EQ(back.classes, ds.classes);
  EXPECT_EQ(back.scheme, ds.scheme);
  EXPECT_EQ(back.band_names, ds.band_names);
  EXPECT_EQ(back.labels, ds.labels);
  EXPECT_EQ(back.subject_ids, ds.subject_ids);
  EXPECT_EQ(back.trial_ids, ds.trial_ids);
  ASSERT_EQ(back.features.size(), ds.features.size());
  for (std::size_t i = 0; i < ds.features.size(); ++i)
    EXPECT_EQ(back.features[i], static_cast<double>(static_cast<float>(ds.features[i])));
  EXPECT_EQ(fs::file_size(dir / "features.f32"), ds.features.size() * 4);
  EXPECT_EQ(fs::file_size(dir / "labels.i64"), ds.size() * 8);
}

TEST(Bundle, HandAuthoredFixtureLoadsInDeclaredOrder) {
  const FeatureDataset ds = load_dataset(fs::path(RGNN_TEST_FIXTURES) / "tiny_bundle");
  ASSERT_EQ(ds.size(), 2u);
  ASSERT_EQ(ds.channels, 2u);
  ASSERT_EQ(ds.bands, 1u);
  EXPECT_EQ(ds.features, (std::vector<double>{0.5, -1.25, 2.0, 3.75}));
  EXPECT_EQ(ds.sample(1)(0, 0), 2.0);
  EXPECT_EQ(ds.sample(1)(1, 0), 3.75);
  EXPECT_EQ(ds.labels, (std::vector<std::int64_t>{0, 1}));
}

TEST(Bundle, TruncatedBlobsAreCorrupt) {
  const fs::path dir = scratch("truncated");
  fs::copy(fs::path(RGNN_TEST_FIXTURES) / "tiny_bundle", dir);
  fs::resize_file(dir / "features.f32", 12);
  EXPECT_THROW(load_dataset(dir), CorruptBundleError);
  fs::remove_all(dir);
  fs::copy(fs::path(RGNN_TEST_FIXTURES) / "tiny_bundle", dir);
  fs::resize_file(dir / "labels.i64", 15);
  EXPECT_THROW(load_dataset(dir), CorruptBundleError);
}

TEST(Bundle, ManifestProblemsAreCorrupt) {
  const fs::path dir = scratch("manifest");
  fs::copy(fs::path(RGNN_TEST_FIXTURES) / "tiny_bundle", dir);
  { std::ofstream(dir / "manifest.json") << R"({"N": 2, "n": 2})"; }
  EXPECT_THROW(load_dataset(dir), CorruptBundleError);
  { std::ofstream(dir / "manifest.json") << "not json"; }
  EXPECT_THROW(load_dataset(dir), CorruptBundleError);
  EXPECT_THROW(load_dataset(scratch("missing")), CorruptBundleError);
}

TEST(Dataset, ValidateEnforcesOneLabelPerTrial) {
  FeatureDataset ds = synthesize(tiny_synth());
  EXPECT_NO_THROW(ds.validate());
  ds.labels[1] = (ds.labels[0] + 1) % 3;
  EXPECT_THROW(ds.validate(), ConfigError);
  ds = synthesize(tiny_synth());
  ds.labels[0] = 3;
  EXPECT_THROW(ds.validate(), ConfigError);
  ds = synthesize(tiny_synth());
  ds.trial_ids.pop_back();
  EXPECT_THROW(ds.validate(), ConfigError);
}

TEST(Synth, DeterministicAndSeedSensitive) {
  const auto a = synthesize(tiny_synth(5));
  const auto b = synthesize(tiny_synth(5));
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_NE(a.features, synthesize(tiny_synth(6)).features);
}

TEST(Synth, ShapeAndTrialStructure) {
  const auto ds = synthesize(tiny_synth());
  EXPECT_EQ(ds.size(), 3u * 2 * 3 * 4);
  EXPECT_EQ(ds.scheme, LabelScheme::seed3);
  EXPECT_EQ(ds.band_names, default_band_names(5));
  std::map<std::int64_t, std::set<std::int64_t>> labels_per_subject;
  for (std::size_t i = 0; i < ds.size(); ++i) labels_per_subject[ds.subject_ids[i]].insert(ds.labels[i]);
  EXPECT_EQ(labels_per_subject.size(), 3u);
  for (const auto& [s, labels] : labels_per_subject) EXPECT_EQ(labels.size(), 3u);
  EXPECT_EQ(synthesize([] { auto c = tiny_synth(); c.classes = 4; return c; }()).scheme, LabelScheme::seed4);
}

TEST(Synth, ClassMeansDifferBySeparation) {
  SynthConfig c;
  c.subjects = 10;
  c.trials_per_class = 10;
  c.samples_per_trial = 34;
  c.channels = 10;
  c.bands = 2;
  c.classes = 3;
  c.class_separation = 1.5;
  c.seed = 3;
  const auto ds = synthesize(c);
  ASSERT_GE(ds.size(), 10000u);
  const auto informative = informative_channels(c.channels);
  // Negative (-1,0) vs neutral (0,0) differ only along valence: |mean diff| = separation on every informative feature.
  std::vector<double> sum0(ds.sample_stride()), sum1(ds.sample_stride());
  std::size_t n0 = 0, n1 = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.labels[i] > 1) continue;
    auto& sum = ds.labels[i] == 0 ? sum0 : sum1;
    (ds.labels[i] == 0 ? n0 : n1)++;
    const auto x = ds.sample_span(i);
    for (std::size_t k = 0; k < x.size(); ++k) sum[k] += x[k];
  }
  for (std::size_t ch : informative)
    for (std::size_t b = 0; b < c.bands; ++b) {
      const std::size_t k = ch * c.bands + b;
      EXPECT_NEAR(std::abs(sum0[k] / n0 - sum1[k] / n1), 1.5, 0.15) << "channel " << ch;
    }
  for (std::size_t ch = 0; ch < c.channels; ++ch) {
    if (std::find(informative.begin(), informative.end(), ch) != informative.end()) continue;
    EXPECT_NEAR(sum0[ch * c.bands] / n0 - sum1[ch * c.bands] / n1, 0.0, 0.15);
  }
}

TEST(Synth, NoiseNeverReachesTheOppositeClass) {
  for (std::size_t classes : {3u, 4u}) {
    SynthConfig c = tiny_synth();
    c.classes = classes;
    c.samples_per_trial = 30;
    c.label_noise_rate = 1.0;
    const auto r = synthesize_with_truth(c);
    const LabelScheme scheme = classes == 3 ? LabelScheme::seed3 : LabelScheme::seed4;
    std::size_t mismatched = 0;
    for (std::size_t i = 0; i < r.dataset.size(); ++i) {
      const auto label = static_cast<std::size_t>(r.dataset.labels[i]);
      const auto gen = static_cast<std::size_t>(r.generative_classes[i]);
      const auto allowed = plausible_confusions(scheme, classes, label);
      EXPECT_NE(gen, label);
      EXPECT_NE(std::find(allowed.begin(), allowed.end(), gen), allowed.end());
      const bool opposite = classes == 3 ? (label == 0 && gen == 2) || (label == 2 && gen == 0)
                                         : (label == 1 && gen == 3) || (label == 3 && gen == 1);
      EXPECT_FALSE(opposite) << "label " << label << " drawn from " << gen;
      mismatched += gen != label;
    }
    EXPECT_EQ(mismatched, r.dataset.size());
  }
}

TEST(Synth, NoiseRateIsApproximatelyHonoured) {
  SynthConfig c = tiny_synth();
  c.samples_per_trial = 200;
  c.label_noise_rate = 0.2;
  const auto r = synthesize_with_truth(c);
  std::size_t flipped = 0;
  for (std::size_t i = 0; i < r.dataset.size(); ++i) flipped += r.generative_classes[i] != r.dataset.labels[i];
  EXPECT_NEAR(static_cast<double>(flipped) / r.dataset.size(), 0.2, 0.03);
}

TEST(Synth, PlausibleConfusionTables) {
  EXPECT_EQ(plausible_confusions(LabelScheme::seed3, 3, 0), (std::vector<std::size_t>{1}));
  EXPECT_EQ(plausible_confusions(LabelScheme::seed3, 3, 1), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(plausible_confusions(LabelScheme::seed4, 4, 1), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(plausible_confusions(LabelScheme::seed4, 4, 0), (std::vector<std::size_t>{1, 2, 3}));
}

TEST(Synth, SeparableShiftFreeDataIsLinearlyClassifiableAcrossSubjects) {
  SynthConfig c;
  c.subjects = 4;
  c.trials_per_class = 2;
  c.samples_per_trial = 10;
  c.channels = 20;
  c.class_separation = 5.0;
  c.seed = 9;
  const auto ds = synthesize(c);
  // Nearest-centroid probe (a linear rule) trained leave-one-subject-out.
  std::size_t correct = 0;
  for (const auto& fold : split_loso(ds)) {
    std::vector<std::vector<double>> centroid(3, std::vector<double>(ds.sample_stride(), 0.0));
    std::vector<std::size_t> count(3, 0);
    for (std::size_t i = 0; i < fold.train.size(); ++i) {
      const auto x = flat(fold.train, i);
      auto& m = centroid[fold.train.labels[i]];
      for (std::size_t k = 0; k < x.size(); ++k) m[k] += x[k];
      ++count[fold.train.labels[i]];
    }
    for (std::size_t i = 0; i < fold.test.size(); ++i) {
      const auto x = flat(fold.test, i);
      std::size_t best = 0;
      double best_d = 1e300;
      for (std::size_t cl = 0; cl < 3; ++cl) {
        double d = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) d += std::pow(x[k] - centroid[cl][k] / count[cl], 2);
        if (d < best_d) best_d = d, best = cl;
      }
      correct += best == static_cast<std::size_t>(fold.test.labels[i]);
    }
  }
  EXPECT_GT(static_cast<double>(correct) / ds.size(), 0.95);
}

TEST(Synth, InvalidConfigRejected) {
  SynthConfig c = tiny_synth();
  c.label_noise_rate = 1.5;
  EXPECT_THROW(synthesize(c), ConfigError);
  c = tiny_synth();
  c.subjects = 0;
  EXPECT_THROW(synthesize(c), ConfigError);
}

TEST(SubjectDependentSplit, PaperTrialCounts) {
  for (auto [trials_per_class, train_trials, classes] : {std::tuple{5u, 9u, 3u}, std::tuple{6u, 16u, 4u}}) {
    SynthConfig c = tiny_synth();
    c.trials_per_class = trials_per_class;
    c.samples_per_trial = 2;
    c.classes = classes;
    const auto ds = synthesize(c);
    const auto splits = split_subject_dependent(ds, train_trials);
    ASSERT_EQ(splits.size(), 3u);
    const std::size_t total = trials_per_class * classes;
    for (const auto& s : splits) {
      std::set<std::int64_t> train_trials_seen, test_trials_seen;
      for (auto t : s.train.trial_ids) train_trials_seen.insert(t);
      for (auto t : s.test.trial_ids) test_trials_seen.insert(t);
      EXPECT_EQ(train_trials_seen.size(), train_trials);
      EXPECT_EQ(test_trials_seen.size(), total - train_trials);
      EXPECT_LT(*train_trials_seen.rbegin(), *test_trials_seen.begin());
      for (auto id : s.train.subject_ids) EXPECT_EQ(id, s.subject);
      for (auto id : s.test.subject_ids) EXPECT_EQ(id, s.subject);
    }
  }
}

TEST(SubjectDependentSplit, AllTrialsForTrainingIsAnError) {
  const auto ds = synthesize(tiny_synth());
  EXPECT_THROW(split_subject_dependent(ds, 6), ConfigError);
  EXPECT_NO_THROW(split_subject_dependent(ds, 5));
}

TEST(LosoSplit, PartitionsAndCoversEverySubject) {
  SynthConfig c = tiny_synth();
  c.subjects = 15;
  c.samples_per_trial = 1;
  const auto ds = synthesize(c);
  const auto folds = split_loso(ds);
  ASSERT_EQ(folds.size(), 15u);
  std::size_t test_total = 0;
  for (const auto& f : folds) {
    EXPECT_EQ(f.train.size() + f.test.size(), ds.size());
    for (auto id : f.test.subject_ids) EXPECT_EQ(id, f.subject);
    for (auto id : f.train.subject_ids) EXPECT_NE(id, f.subject);
    test_total += f.test.size();
  }
  EXPECT_EQ(test_total, ds.size());
}

TEST(LosoSplit, TwoSubjectsAreComplementaryAndOneIsAnError) {
  SynthConfig c = tiny_synth();
  c.subjects = 2;
  const auto ds = synthesize(c);
  const auto folds = split_loso(ds);
  ASSERT_EQ(folds.size(), 2u);
  EXPECT_EQ(folds[0].train.features, folds[1].test.features);
  EXPECT_EQ(folds[1].train.features, folds[0].test.features);
  c.subjects = 1;
  EXPECT_THROW(split_loso(synthesize(c)), ConfigError);
}

TEST(Splits, NeverLeakTrialGroups) {
  const auto ds = synthesize(tiny_synth());
  auto check = [](const Split& s) {
    std::set<std::pair<std::int64_t, std::int64_t>> train;
    for (std::size_t i = 0; i < s.train.size(); ++i) train.emplace(s.train.subject_ids[i], s.train.trial_ids[i]);
    for (std::size_t i = 0; i < s.test.size(); ++i)
      EXPECT_FALSE(train.count({s.test.subject_ids[i], s.test.trial_ids[i]}));
  };
  for (const auto& s : split_loso(ds)) check(s);
  for (const auto& s : split_subject_dependent(ds, 4)) check(s);
}

TEST(BandSelect, IdentitySliceAndOrder) {
  const auto ds = synthesize(tiny_synth());
  const std::vector<std::string> all = ds.band_names;
  EXPECT_EQ(band_select(ds, all).features, ds.features);

  const std::vector<std::string> gamma{"gamma"};
  const auto g = band_select(ds, gamma);
  ASSERT_EQ(g.bands, 1u);
  for (std::size_t i = 0; i < ds.size(); ++i)
    for (std::size_t ch = 0; ch < ds.channels; ++ch) EXPECT_EQ(g.sample(i)(ch, 0), ds.sample(i)(ch, 4));

  const std::vector<std::string> bg{"beta", "gamma"}, gb{"gamma", "beta"};
  const auto x = band_select(ds, bg);
  EXPECT_EQ(x.band_names, bg);
  EXPECT_EQ(x.sample(0)(2, 0), ds.sample(0)(2, 3));
  EXPECT_EQ(x.sample(0)(2, 1), ds.sample(0)(2, 4));
  EXPECT_EQ(band_select(ds, gb).sample(0)(2, 0), ds.sample(0)(2, 4));
}

TEST(BandSelect, ComposesAndRejectsUnknown) {
  const auto ds = synthesize(tiny_synth());
  const std::vector<std::string> b1{"theta", "alpha", "gamma"}, b2{"gamma", "theta"};
  EXPECT_EQ(band_select(band_select(ds, b1), b2).features, band_select(ds, b2).features);
  const std::vector<std::string> bad{"kappa"}, twice{"alpha", "alpha"};
  EXPECT_THROW(band_select(ds, bad), ConfigError);
  EXPECT_THROW(band_select(ds, twice), ConfigError);
}

TEST(Resample, EqualSizeIsAPermutation) {
  auto idx = resample_indices(10, 10, 3);
  ASSERT_EQ(idx.size(), 10u);
  std::sort(idx.begin(), idx.end());
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(idx[i], i);
}

TEST(Resample, SingleSampleRepeated) {
  EXPECT_EQ(resample_indices(5, 1, 8), (std::vector<std::size_t>(5, 0)));
}

TEST(Resample, DownsampleWithoutReplacement) {
  const auto idx = resample_indices(20, 100, 4);
  ASSERT_EQ(idx.size(), 20u);
  EXPECT_EQ(std::set<std::size_t>(idx.begin(), idx.end()).size(), 20u);
  for (auto i : idx) EXPECT_LT(i, 100u);
}

TEST(Resample, OversampleAndDeterminism) {
  const auto a = resample_indices(50, 7, 1);
  EXPECT_EQ(a.size(), 50u);
  for (auto i : a) EXPECT_LT(i, 7u);
  EXPECT_EQ(a, resample_indices(50, 7, 1));
  EXPECT_NE(a, resample_indices(50, 7, 2));
}

TEST(Resample, DatasetOverloadsAndEmptyTarget) {
  const auto ds = synthesize(tiny_synth());
  const auto r = resample_target(5, ds, 3);
  EXPECT_EQ(r.size(), 5u);
  const auto u = resample_target(5, strip_labels(ds), 3);
  EXPECT_EQ(u.size(), 5u);
  EXPECT_EQ(u.features, r.features);
  EXPECT_THROW(resample_indices(5, 0, 1), ConfigError);
}

TEST(StripLabels, KeepsFeaturesOnly) {
  const auto ds = synthesize(tiny_synth());
  const UnlabeledDataset u = strip_labels(ds);
  EXPECT_EQ(u.size(), ds.size());
  EXPECT_EQ(u.features, ds.features);
  EXPECT_EQ(u.sample(3), ds.sample(3));
}
