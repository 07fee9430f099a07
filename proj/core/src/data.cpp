#include "rgnn/data.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "rgnn/errors.hpp"
#include "rgnn/random.hpp"

namespace rgnn {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(LabelScheme scheme) noexcept {
  switch (scheme) {
    case LabelScheme::seed3:
      return "seed3";
    case LabelScheme::seed4:
      return "seed4";
    case LabelScheme::custom:
      break;
  }
  return "custom";
}

LabelScheme parse_label_scheme(std::string_view name) {
  if (name == "seed3") return LabelScheme::seed3;
  if (name == "seed4") return LabelScheme::seed4;
  if (name == "custom") return LabelScheme::custom;
  throw ConfigError("unknown label scheme '" + std::string(name) + "' (expected seed3, seed4 or custom)");
}

std::optional<std::size_t> scheme_classes(LabelScheme scheme) noexcept {
  switch (scheme) {
    case LabelScheme::seed3:
      return 3;
    case LabelScheme::seed4:
      return 4;
    case LabelScheme::custom:
      break;
  }
  return std::nullopt;
}

namespace {

Matrix sample_matrix(std::span<const double> values, std::size_t channels, std::size_t bands) {
  Matrix m(static_cast<Eigen::Index>(channels), static_cast<Eigen::Index>(bands));
  for (std::size_t c = 0; c < channels; ++c)
    for (std::size_t b = 0; b < bands; ++b)
      m(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(b)) = values[c * bands + b];
  return m;
}

}  // namespace

Matrix FeatureDataset::sample(std::size_t i) const { return sample_matrix(sample_span(i), channels, bands); }

Matrix UnlabeledDataset::sample(std::size_t i) const { return sample_matrix(sample_span(i), channels, bands); }

void FeatureDataset::validate() const {
  const std::size_t n = size();
  if (channels == 0 || bands == 0) throw ConfigError("dataset: channel and band counts must be positive");
  if (classes == 0) throw ConfigError("dataset: class count must be positive");
  if (auto c = scheme_classes(scheme); c && *c != classes)
    throw ConfigError("dataset: scheme " + std::string(to_string(scheme)) + " implies " + std::to_string(*c) +
                      " classes, manifest declares " + std::to_string(classes));
  if (features.size() != n * channels * bands) throw ConfigError("dataset: feature array length mismatch");
  if (subject_ids.size() != n || trial_ids.size() != n) throw ConfigError("dataset: id array length mismatch");
  if (band_names.size() != bands) throw ConfigError("dataset: band name count mismatch");
  if (std::set<std::string>(band_names.begin(), band_names.end()).size() != bands)
    throw ConfigError("dataset: duplicate band names");
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> group_label;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= classes)
      throw ConfigError("dataset: label " + std::to_string(labels[i]) + " at sample " + std::to_string(i) +
                        " out of range");
    auto [it, inserted] = group_label.emplace(std::pair{subject_ids[i], trial_ids[i]}, labels[i]);
    if (!inserted && it->second != labels[i])
      throw ConfigError("dataset: subject " + std::to_string(subject_ids[i]) + " trial " +
                        std::to_string(trial_ids[i]) + " carries more than one label");
  }
}

UnlabeledDataset strip_labels(const FeatureDataset& ds) { return {ds.channels, ds.bands, ds.features}; }

FeatureDataset subset(const FeatureDataset& ds, std::span<const std::size_t> indices) {
  FeatureDataset out;
  out.channels = ds.channels;
  out.bands = ds.bands;
  out.classes = ds.classes;
  out.scheme = ds.scheme;
  out.band_names = ds.band_names;
  const std::size_t stride = ds.sample_stride();
  out.features.reserve(indices.size() * stride);
  for (std::size_t i : indices) {
    if (i >= ds.size()) throw ConfigError("subset: index out of range");
    auto s = ds.sample_span(i);
    out.features.insert(out.features.end(), s.begin(), s.end());
    out.labels.push_back(ds.labels[i]);
    out.subject_ids.push_back(ds.subject_ids[i]);
    out.trial_ids.push_back(ds.trial_ids[i]);
  }
  return out;
}

std::vector<std::string> default_band_names(std::size_t bands) {
  if (bands == 5) return {"delta", "theta", "alpha", "beta", "gamma"};
  std::vector<std::string> names;
  for (std::size_t b = 0; b < bands; ++b) names.push_back("band" + std::to_string(b));
  return names;
}

// ---------------------------------------------------------------------------
// Bundle IO

void save_dataset(const FeatureDataset& ds, const fs::path& dir) {
  ds.validate();
  fs::create_directories(dir);
  json manifest = {
      {"N", ds.size()},
      {"n", ds.channels},
      {"d", ds.bands},
      {"C", ds.classes},
      {"band_names", ds.band_names},
      {"label_scheme", std::string(to_string(ds.scheme))},
      {"subject_ids", ds.subject_ids},
      {"trial_ids", ds.trial_ids},
  };
  {
    std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + (dir / "manifest.json").string());
    out << manifest.dump(2) << '\n';
  }
  {
    std::ofstream out(dir / "features.f32", std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + (dir / "features.f32").string());
    std::vector<unsigned char> buf(ds.features.size() * 4);
    for (std::size_t i = 0; i < ds.features.size(); ++i)
      binary::put_le32(std::bit_cast<std::uint32_t>(static_cast<float>(ds.features[i])), &buf[4 * i]);
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  }
  {
    std::ofstream out(dir / "labels.i64", std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + (dir / "labels.i64").string());
    std::vector<unsigned char> buf(ds.labels.size() * 8);
    for (std::size_t i = 0; i < ds.labels.size(); ++i)
      binary::put_le64(static_cast<std::uint64_t>(ds.labels[i]), &buf[8 * i]);
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  }
}

namespace {

std::vector<unsigned char> read_blob(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptBundleError("missing bundle file " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <typename T>
T manifest_field(const json& m, const char* key) {
  if (!m.contains(key)) throw CorruptBundleError(std::string("manifest.json: missing field '") + key + "'");
  try {
    return m.at(key).get<T>();
  } catch (const json::exception& e) {
    throw CorruptBundleError(std::string("manifest.json: field '") + key + "': " + e.what());
  }
}

}  // namespace

FeatureDataset load_dataset(const fs::path& dir) {
  json manifest;
  {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw CorruptBundleError("missing bundle file " + (dir / "manifest.json").string());
    try {
      in >> manifest;
    } catch (const json::exception& e) {
      throw CorruptBundleError(std::string("manifest.json: ") + e.what());
    }
  }
  FeatureDataset ds;
  const auto n = manifest_field<std::size_t>(manifest, "N");
  ds.channels = manifest_field<std::size_t>(manifest, "n");
  ds.bands = manifest_field<std::size_t>(manifest, "d");
  ds.classes = manifest_field<std::size_t>(manifest, "C");
  ds.band_names = manifest_field<std::vector<std::string>>(manifest, "band_names");
  try {
    ds.scheme = parse_label_scheme(manifest_field<std::string>(manifest, "label_scheme"));
  } catch (const ConfigError& e) {
    throw CorruptBundleError(std::string("manifest.json: ") + e.what());
  }
  ds.subject_ids = manifest_field<std::vector<std::int64_t>>(manifest, "subject_ids");
  ds.trial_ids = manifest_field<std::vector<std::int64_t>>(manifest, "trial_ids");

  const auto features = read_blob(dir / "features.f32");
  const std::size_t expected_values = n * ds.channels * ds.bands;
  if (features.size() != expected_values * 4)
    throw CorruptBundleError("features.f32 holds " + std::to_string(features.size()) + " bytes, manifest implies " +
                             std::to_string(expected_values * 4));
  ds.features.resize(expected_values);
  for (std::size_t i = 0; i < expected_values; ++i)
    ds.features[i] = static_cast<double>(std::bit_cast<float>(binary::get_le32(&features[4 * i])));

  const auto labels = read_blob(dir / "labels.i64");
  if (labels.size() != n * 8)
    throw CorruptBundleError("labels.i64 holds " + std::to_string(labels.size()) + " bytes, manifest implies " +
                             std::to_string(n * 8));
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) ds.labels[i] = static_cast<std::int64_t>(binary::get_le64(&labels[8 * i]));

  if (ds.subject_ids.size() != n || ds.trial_ids.size() != n)
    throw CorruptBundleError("manifest.json: id arrays do not have N entries");
  try {
    ds.validate();
  } catch (const ConfigError& e) {
    throw CorruptBundleError(e.what());
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Splits

std::vector<Split> split_subject_dependent(const FeatureDataset& ds, std::size_t train_trials) {
  std::map<std::int64_t, std::set<std::int64_t>> trials_of;
  for (std::size_t i = 0; i < ds.size(); ++i) trials_of[ds.subject_ids[i]].insert(ds.trial_ids[i]);
  if (trials_of.empty()) throw ConfigError("split_subject_dependent: empty dataset");
  if (train_trials == 0) throw ConfigError("split_subject_dependent: train_trials must be positive");

  std::vector<Split> splits;
  for (const auto& [subject, trials] : trials_of) {
    if (trials.size() <= train_trials)
      throw ConfigError("split_subject_dependent: subject " + std::to_string(subject) + " has " +
                        std::to_string(trials.size()) + " trials, needs more than " + std::to_string(train_trials) +
                        " to leave a test set");
    std::set<std::int64_t> train_set(trials.begin(), std::next(trials.begin(), static_cast<long>(train_trials)));
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (ds.subject_ids[i] != subject) continue;
      (train_set.count(ds.trial_ids[i]) ? train_idx : test_idx).push_back(i);
    }
    splits.push_back({subject, subset(ds, train_idx), subset(ds, test_idx)});
  }
  return splits;
}

std::vector<Split> split_loso(const FeatureDataset& ds) {
  std::set<std::int64_t> subjects(ds.subject_ids.begin(), ds.subject_ids.end());
  if (subjects.size() < 2) throw ConfigError("split_loso: needs at least two subjects");
  std::vector<Split> folds;
  for (std::int64_t subject : subjects) {
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < ds.size(); ++i) (ds.subject_ids[i] == subject ? test_idx : train_idx).push_back(i);
    folds.push_back({subject, subset(ds, train_idx), subset(ds, test_idx)});
  }
  return folds;
}

FeatureDataset band_select(const FeatureDataset& ds, std::span<const std::string> bands) {
  if (bands.empty()) throw ConfigError("band_select: no bands requested");
  std::vector<std::size_t> columns;
  for (const auto& name : bands) {
    auto it = std::find(ds.band_names.begin(), ds.band_names.end(), name);
    if (it == ds.band_names.end()) throw ConfigError("band_select: unknown band '" + name + "'");
    columns.push_back(static_cast<std::size_t>(it - ds.band_names.begin()));
  }
  if (std::set<std::size_t>(columns.begin(), columns.end()).size() != columns.size())
    throw ConfigError("band_select: band requested twice");

  FeatureDataset out = ds;
  out.bands = columns.size();
  out.band_names.assign(bands.begin(), bands.end());
  out.features.resize(ds.size() * ds.channels * out.bands);
  for (std::size_t i = 0; i < ds.size(); ++i)
    for (std::size_t c = 0; c < ds.channels; ++c)
      for (std::size_t k = 0; k < columns.size(); ++k)
        out.features[(i * ds.channels + c) * out.bands + k] = ds.features[(i * ds.channels + c) * ds.bands + columns[k]];
  return out;
}

std::vector<std::size_t> resample_indices(std::size_t source_n, std::size_t target_n, std::uint64_t seed) {
  if (target_n == 0) throw ConfigError("resample_target: empty target dataset");
  Rng rng(seed);
  std::vector<std::size_t> idx;
  if (source_n > target_n) {
    std::uniform_int_distribution<std::size_t> pick(0, target_n - 1);
    idx.resize(source_n);
    for (auto& i : idx) i = pick(rng);
  } else {
    idx.resize(target_n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(source_n);
  }
  return idx;
}

FeatureDataset resample_target(std::size_t source_n, const FeatureDataset& target, std::uint64_t seed) {
  const auto idx = resample_indices(source_n, target.size(), seed);
  return subset(target, idx);
}

UnlabeledDataset resample_target(std::size_t source_n, const UnlabeledDataset& target, std::uint64_t seed) {
  const auto idx = resample_indices(source_n, target.size(), seed);
  UnlabeledDataset out{target.channels, target.bands, {}};
  out.features.reserve(idx.size() * target.sample_stride());
  for (std::size_t i : idx) {
    auto s = target.sample_span(i);
    out.features.insert(out.features.end(), s.begin(), s.end());
  }
  return out;
}

}  // namespace rgnn
