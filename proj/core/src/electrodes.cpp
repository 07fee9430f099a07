#include "rgnn/electrodes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "rgnn/errors.hpp"

namespace rgnn {

namespace {

constexpr const char* kSeed62Text =
#include "seed62_layout.inc"
    ;

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

}  // namespace

std::size_t ElectrodeLayout::index_of(std::string_view name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ConfigError("unknown electrode '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - names.begin());
}

void ElectrodeLayout::validate() const {
  if (names.size() < 2) throw ConfigError("electrode layout needs at least two electrodes");
  if (coords.rows() != static_cast<Eigen::Index>(names.size()) || coords.cols() != 3)
    throw ShapeError("electrode layout: coordinates must be n x 3");
  if (std::set<std::string>(names.begin(), names.end()).size() != names.size())
    throw ConfigError("electrode layout: duplicate electrode names");
  for (Eigen::Index i = 0; i < coords.rows(); ++i)
    for (Eigen::Index j = i + 1; j < coords.rows(); ++j)
      if (coords.row(i) == coords.row(j))
        throw DegenerateLayoutError("electrodes " + names[static_cast<std::size_t>(i)] + " and " +
                                    names[static_cast<std::size_t>(j)] + " share coordinates");
}

ElectrodeLayout ElectrodeLayout::parse(std::istream& in) {
  std::vector<std::string> names;
  std::vector<double> xyz;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream row(strip_comment(line));
    std::string name;
    if (!(row >> name)) continue;
    double x, y, z;
    std::string extra;
    if (!(row >> x >> y >> z) || (row >> extra))
      throw ConfigError("layout line " + std::to_string(line_no) + ": expected 'name x y z'");
    names.push_back(name);
    xyz.insert(xyz.end(), {x, y, z});
  }
  ElectrodeLayout layout;
  layout.names = std::move(names);
  layout.coords.resize(static_cast<Eigen::Index>(layout.names.size()), 3);
  for (Eigen::Index i = 0; i < layout.coords.rows(); ++i)
    for (Eigen::Index k = 0; k < 3; ++k) layout.coords(i, k) = xyz[static_cast<std::size_t>(3 * i + k)];
  layout.validate();
  return layout;
}

ElectrodeLayout ElectrodeLayout::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open layout file " + path.string());
  return parse(in);
}

const ElectrodeLayout& seed62_layout() {
  static const ElectrodeLayout layout = [] {
    std::istringstream in(kSeed62Text);
    return ElectrodeLayout::parse(in);
  }();
  return layout;
}

ElectrodeLayout layout_prefix(const ElectrodeLayout& layout, std::size_t n) {
  if (n > layout.size()) throw ConfigError("layout has only " + std::to_string(layout.size()) + " electrodes");
  ElectrodeLayout out;
  out.names.assign(layout.names.begin(), layout.names.begin() + static_cast<long>(n));
  out.coords = layout.coords.topRows(static_cast<Eigen::Index>(n));
  out.validate();
  return out;
}

void GlobalPairSet::validate(const ElectrodeLayout& layout) const {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& [a, b] : pairs) {
    const std::size_t i = layout.index_of(a);
    const std::size_t j = layout.index_of(b);
    if (i == j) throw ConfigError("global pair " + a + "-" + b + " connects an electrode to itself");
    if (!seen.emplace(std::min(i, j), std::max(i, j)).second)
      throw ConfigError("global pair " + a + "-" + b + " listed twice");
  }
}

GlobalPairSet GlobalPairSet::restricted_to(const ElectrodeLayout& layout) const {
  GlobalPairSet out;
  auto has = [&](const std::string& name) {
    return std::find(layout.names.begin(), layout.names.end(), name) != layout.names.end();
  };
  for (const auto& p : pairs)
    if (has(p.first) && has(p.second)) out.pairs.push_back(p);
  return out;
}

GlobalPairSet GlobalPairSet::parse(std::istream& in) {
  GlobalPairSet set;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream row(strip_comment(line));
    std::string a, b, extra;
    if (!(row >> a)) continue;
    if (!(row >> b) || (row >> extra))
      throw ConfigError("global pair line " + std::to_string(line_no) + ": expected 'NAME1 NAME2'");
    set.pairs.emplace_back(a, b);
  }
  return set;
}

GlobalPairSet GlobalPairSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open global pair file " + path.string());
  return parse(in);
}

GlobalPairSet default_global_pairs() {
  return {{{"FP1", "FP2"},
           {"AF3", "AF4"},
           {"F5", "F6"},
           {"FC5", "FC6"},
           {"C5", "C6"},
           {"CP5", "CP6"},
           {"P5", "P6"},
           {"PO5", "PO6"},
           {"O1", "O2"}}};
}

GlobalPairSet near_central_global_pairs() {
  return {{{"FP1", "FP2"},
           {"AF3", "AF4"},
           {"F3", "F4"},
           {"FC3", "FC4"},
           {"C3", "C4"},
           {"CP3", "CP4"},
           {"P3", "P4"},
           {"PO5", "PO6"},
           {"O1", "O2"}}};
}

GlobalPairSet far_lateral_global_pairs() {
  return {{{"FP1", "FP2"},
           {"AF3", "AF4"},
           {"F7", "F8"},
           {"FT7", "FT8"},
           {"T7", "T8"},
           {"TP7", "TP8"},
           {"P7", "P8"},
           {"PO7", "PO8"},
           {"O1", "O2"}}};
}

GlobalPairSet named_global_pairs(std::string_view name) {
  if (name == "default") return default_global_pairs();
  if (name == "near_central") return near_central_global_pairs();
  if (name == "far_lateral") return far_lateral_global_pairs();
  if (name == "none") return {};
  throw ConfigError("unknown global pair set '" + std::string(name) +
                    "' (expected default, near_central, far_lateral or none)");
}

Matrix pairwise_distances(const ElectrodeLayout& layout) {
  if (layout.coords.cols() != 3 || layout.coords.rows() != static_cast<Eigen::Index>(layout.size()))
    throw ShapeError("electrode layout: coordinates must be n x 3");
  const Eigen::Index n = layout.coords.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dist = (layout.coords.row(i) - layout.coords.row(j)).norm();
      if (!(dist > 0.0))
        throw DegenerateLayoutError("electrodes " + layout.names[static_cast<std::size_t>(i)] + " and " +
                                    layout.names[static_cast<std::size_t>(j)] + " share coordinates");
      d(i, j) = dist;
      d(j, i) = dist;
    }
  }
  return d;
}

SymmetricAdjacency init_local_adjacency(const Matrix& distances, double delta) {
  if (distances.rows() != distances.cols()) throw ShapeError("distance matrix must be square");
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  const auto n = static_cast<std::size_t>(distances.rows());
  SymmetricAdjacency a(n);
  for (std::size_t i = 0; i < n; ++i) {
    a.set(i, i, 1.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dij = distances(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (!(dij > 0.0)) throw DegenerateLayoutError("zero off-diagonal distance");
      a.set(i, j, std::min(1.0, delta / (dij * dij)));
    }
  }
  return a;
}

SymmetricAdjacency apply_global_connections(SymmetricAdjacency adjacency, const ElectrodeLayout& layout,
                                            const GlobalPairSet& pairs) {
  if (layout.size() != adjacency.size())
    throw ShapeError("layout has " + std::to_string(layout.size()) + " electrodes, adjacency has " +
                     std::to_string(adjacency.size()));
  pairs.validate(layout);
  for (const auto& [a, b] : pairs.pairs) {
    const std::size_t i = layout.index_of(a);
    const std::size_t j = layout.index_of(b);
    adjacency.set(i, j, adjacency(i, j) - 1.0);
  }
  return adjacency;
}

double sparsity_fraction(const SymmetricAdjacency& adjacency, double threshold) {
  const std::size_t n = adjacency.size();
  if (n < 2) return 0.0;
  std::size_t above = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(adjacency(i, j)) > threshold) ++above;
  return static_cast<double>(above) / static_cast<double>(n * (n - 1) / 2);
}

double calibrate_delta(const Matrix& distances, double target, double threshold) {
  if (!(target > 0.0 && target <= 1.0)) throw ConfigError("sparsity target must be in (0,1]");
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("sparsity threshold must be in (0,1)");
  double lo = 0.0;
  double hi = threshold * distances.maxCoeff() * distances.maxCoeff() * 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sparsity_fraction(init_local_adjacency(distances, mid), threshold) >= target)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

SymmetricAdjacency correlation_adjacency(const FeatureDataset& ds) {
  if (ds.size() < 2) throw ConfigError("correlation_adjacency: needs at least two samples");
  const std::size_t n = ds.channels;
  const std::size_t d = ds.bands;
  const std::size_t m = ds.size() * d;
  // Column c holds channel c's features over all samples and bands.
  Matrix pooled(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::size_t s = 0; s < ds.size(); ++s)
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t b = 0; b < d; ++b)
        pooled(static_cast<Eigen::Index>(s * d + b), static_cast<Eigen::Index>(c)) = ds.features[(s * n + c) * d + b];
  pooled.rowwise() -= pooled.colwise().mean();
  const Vector norms = pooled.colwise().norm().transpose();
  const Matrix cross = pooled.transpose() * pooled;

  SymmetricAdjacency a(n);
  for (std::size_t i = 0; i < n; ++i) {
    a.set(i, i, 1.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double ni = norms(static_cast<Eigen::Index>(i));
      const double nj = norms(static_cast<Eigen::Index>(j));
      double r = 0.0;
      if (ni > 0.0 && nj > 0.0)
        r = std::min(1.0, std::abs(cross(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) / (ni * nj));
      a.set(i, j, r);
    }
  }
  return a;
}

SymmetricAdjacency build_initial_adjacency(const AdjacencyConfig& config, const FeatureDataset& train) {
  if (config.layout.size() != train.channels)
    throw ConfigError("layout has " + std::to_string(config.layout.size()) + " electrodes but data has " +
                      std::to_string(train.channels) + " channels");
  SymmetricAdjacency local;
  if (config.init == AdjacencyConfig::Init::correlation) {
    local = correlation_adjacency(train);
  } else {
    const Matrix dist = pairwise_distances(config.layout);
    const double delta = config.calibrate ? calibrate_delta(dist, config.sparsity_target) : config.delta;
    local = init_local_adjacency(dist, delta);
  }
  return apply_global_connections(std::move(local), config.layout, config.global_pairs);
}

}  // namespace rgnn
