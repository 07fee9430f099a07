#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rgnn/data.hpp"
#include "rgnn/graph.hpp"
#include "rgnn/linalg.hpp"

namespace rgnn {

/// Named electrodes with head-centered coordinates in centimeters.
struct ElectrodeLayout {
  std::vector<std::string> names;
  Matrix coords;  // n x 3

  std::size_t size() const noexcept { return names.size(); }
  /// Throws ConfigError for an unknown name.
  std::size_t index_of(std::string_view name) const;
  /// Unique names, n >= 2, coordinate shape. Duplicate positions are a DegenerateLayoutError.
  void validate() const;

  /// Whitespace-separated "name x y z" rows; '#' starts a comment.
  static ElectrodeLayout parse(std::istream& in);
  static ElectrodeLayout load(const std::filesystem::path& path);
};

/// The shipped 62-channel 10-10 layout (idealized 10 cm sphere).
const ElectrodeLayout& seed62_layout();

/// The first `n` electrodes of `layout`, for datasets with fewer channels.
ElectrodeLayout layout_prefix(const ElectrodeLayout& layout, std::size_t n);

struct GlobalPairSet {
  std::vector<std::pair<std::string, std::string>> pairs;

  /// Every name exists, no self pair, no pair listed twice (in either order).
  void validate(const ElectrodeLayout& layout) const;
  /// Pairs whose electrodes both exist in `layout`.
  GlobalPairSet restricted_to(const ElectrodeLayout& layout) const;

  /// One "NAME1 NAME2" pair per line; '#' comments.
  static GlobalPairSet parse(std::istream& in);
  static GlobalPairSet load(const std::filesystem::path& path);
};

/// Symmetric hemisphere pairs FP1-FP2, AF3-AF4, F5-F6, FC5-FC6, C5-C6, CP5-CP6, P5-P6, PO5-PO6, O1-O2.
GlobalPairSet default_global_pairs();
/// Ablation: pairs nearer the central region.
GlobalPairSet near_central_global_pairs();
/// Ablation: pairs further from the central region.
GlobalPairSet far_lateral_global_pairs();
/// "default", "near_central", "far_lateral" or "none".
GlobalPairSet named_global_pairs(std::string_view name);

/// Euclidean distances; throws DegenerateLayoutError if two electrodes coincide.
Matrix pairwise_distances(const ElectrodeLayout& layout);

/// A_ij = min(1, delta / d_ij^2) off the diagonal, A_ii = 1.
SymmetricAdjacency init_local_adjacency(const Matrix& distances, double delta);

/// Subtracts one from each listed pair, turning [0,1] local weights into [-1,0] global ones.
SymmetricAdjacency apply_global_connections(SymmetricAdjacency adjacency, const ElectrodeLayout& layout,
                                            const GlobalPairSet& pairs);

/// Fraction of off-diagonal entries with |A_ij| > threshold.
double sparsity_fraction(const SymmetricAdjacency& adjacency, double threshold = 0.1);

/// Smallest delta whose local adjacency reaches `target` sparsity at `threshold`, found by bisection.
double calibrate_delta(const Matrix& distances, double target = 0.2, double threshold = 0.1);

/// |Pearson correlation| between channels, pooling every sample and band; unit diagonal.
/// A zero-variance channel gets zero correlation with every other channel.
SymmetricAdjacency correlation_adjacency(const FeatureDataset& features);

/// How the initial adjacency is built for a training run.
struct AdjacencyConfig {
  enum class Init { distance, correlation };
  Init init = Init::distance;
  double delta = 5.0;
  bool calibrate = false;
  double sparsity_target = 0.2;
  ElectrodeLayout layout = seed62_layout();
  GlobalPairSet global_pairs = default_global_pairs();
};

/// Builds the local adjacency (distance or training-set correlation) and applies the global pairs once.
SymmetricAdjacency build_initial_adjacency(const AdjacencyConfig& config, const FeatureDataset& train);

}  // namespace rgnn
