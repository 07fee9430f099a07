#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "rgnn/linalg.hpp"

namespace rgnn {

/// Symmetric n x n matrix stored as its upper triangle (diagonal included),
/// row by row: (0,0), (0,1), ..., (0,n-1), (1,1), ..., (n-1,n-1).
class SymmetricAdjacency {
 public:
  SymmetricAdjacency() = default;
  explicit SymmetricAdjacency(std::size_t n, double fill = 0.0);

  static SymmetricAdjacency identity(std::size_t n);
  /// Throws ShapeError unless `m` is square and exactly symmetric.
  static SymmetricAdjacency from_dense(const Matrix& m);
  static SymmetricAdjacency from_upper(std::size_t n, std::vector<double> upper);

  static constexpr std::size_t parameter_count(std::size_t n) noexcept { return n * (n + 1) / 2; }
  /// Storage slot of (i, j) for either ordering of the indices.
  static std::size_t slot(std::size_t i, std::size_t j, std::size_t n) noexcept;

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return upper_[slot(i, j, n_)]; }
  void set(std::size_t i, std::size_t j, double value) { upper_[slot(i, j, n_)] = value; }

  std::span<double> upper() noexcept { return upper_; }
  std::span<const double> upper() const noexcept { return upper_; }

  Matrix to_dense() const;

  /// Folds a gradient over the full matrix back onto the triangle parameters:
  /// off-diagonal slots receive g(i,j) + g(j,i), diagonal slots receive g(i,i).
  static std::vector<double> fold_gradient(const Matrix& full_gradient);

  friend bool operator==(const SymmetricAdjacency&, const SymmetricAdjacency&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> upper_;
};

/// Normalized propagator S = D^-1/2 A D^-1/2.
struct NormalizedPropagator {
  Matrix s;
};

/// Degrees D_ii = sum_j |A_ij|, diagonal included. Throws IsolatedNodeError on a zero row.
Vector degrees(const SymmetricAdjacency& adjacency);

NormalizedPropagator normalize(const SymmetricAdjacency& adjacency);

/// S^steps X as successive multiplications.
Matrix propagate(const NormalizedPropagator& propagator, const Matrix& x, int steps);

/// u32 n followed by n(n+1)/2 little-endian f64 values.
void write_adjacency(std::ostream& out, const SymmetricAdjacency& adjacency);
SymmetricAdjacency read_adjacency(std::istream& in);

}  // namespace rgnn
