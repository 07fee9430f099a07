#include "rgnn/graph.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <utility>

#include "binary_io.hpp"
#include "rgnn/errors.hpp"

namespace rgnn {

SymmetricAdjacency::SymmetricAdjacency(std::size_t n, double fill) : n_(n), upper_(parameter_count(n), fill) {}

SymmetricAdjacency SymmetricAdjacency::identity(std::size_t n) {
  SymmetricAdjacency a(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) a.set(i, i, 1.0);
  return a;
}

SymmetricAdjacency SymmetricAdjacency::from_dense(const Matrix& m) {
  if (m.rows() != m.cols()) throw ShapeError("adjacency must be square");
  const auto n = static_cast<std::size_t>(m.rows());
  SymmetricAdjacency a(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      if (m(ii, jj) != m(jj, ii)) throw ShapeError("adjacency must be exactly symmetric");
      a.set(i, j, m(ii, jj));
    }
  }
  return a;
}

SymmetricAdjacency SymmetricAdjacency::from_upper(std::size_t n, std::vector<double> upper) {
  if (upper.size() != parameter_count(n))
    throw ShapeError("upper triangle of a " + std::to_string(n) + "-node adjacency needs " +
                     std::to_string(parameter_count(n)) + " values, got " + std::to_string(upper.size()));
  SymmetricAdjacency a;
  a.n_ = n;
  a.upper_ = std::move(upper);
  return a;
}

std::size_t SymmetricAdjacency::slot(std::size_t i, std::size_t j, std::size_t n) noexcept {
  if (i > j) std::swap(i, j);
  return i * n - i * (i - 1) / 2 + (j - i);
}

Matrix SymmetricAdjacency::to_dense() const {
  const auto n = static_cast<Eigen::Index>(n_);
  Matrix m(n, n);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j, ++k) {
      m(i, j) = upper_[k];
      m(j, i) = upper_[k];
    }
  }
  return m;
}

std::vector<double> SymmetricAdjacency::fold_gradient(const Matrix& g) {
  if (g.rows() != g.cols()) throw ShapeError("full-matrix gradient must be square");
  const auto n = g.rows();
  std::vector<double> folded;
  folded.reserve(parameter_count(static_cast<std::size_t>(n)));
  for (Eigen::Index i = 0; i < n; ++i) {
    folded.push_back(g(i, i));
    for (Eigen::Index j = i + 1; j < n; ++j) folded.push_back(g(i, j) + g(j, i));
  }
  return folded;
}

Vector degrees(const SymmetricAdjacency& adjacency) {
  const std::size_t n = adjacency.size();
  Vector d = Vector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d(static_cast<Eigen::Index>(i)) += std::abs(adjacency(i, j));
    if (d(static_cast<Eigen::Index>(i)) == 0.0)
      throw IsolatedNodeError("node " + std::to_string(i) + " has zero degree");
  }
  return d;
}

NormalizedPropagator normalize(const SymmetricAdjacency& adjacency) {
  const Vector d = degrees(adjacency);
  const Vector r = d.array().rsqrt();
  Matrix s = adjacency.to_dense();
  s = r.asDiagonal() * s * r.asDiagonal();
  return {std::move(s)};
}

Matrix propagate(const NormalizedPropagator& propagator, const Matrix& x, int steps) {
  if (propagator.s.cols() != x.rows())
    throw ShapeError("propagate: S is " + std::to_string(propagator.s.rows()) + "x" +
                     std::to_string(propagator.s.cols()) + " but X has " + std::to_string(x.rows()) + " rows");
  if (steps < 0) throw ConfigError("propagate: negative step count");
  Matrix h = x;
  for (int k = 0; k < steps; ++k) h = propagator.s * h;
  return h;
}

void write_adjacency(std::ostream& out, const SymmetricAdjacency& adjacency) {
  binary::write_u32(out, static_cast<std::uint32_t>(adjacency.size()));
  binary::write_f64s(out, adjacency.upper());
}

SymmetricAdjacency read_adjacency(std::istream& in) {
  const std::uint32_t n = binary::read_u32(in);
  if (n > 1u << 14) throw CorruptCheckpointError("adjacency size " + std::to_string(n) + " is implausible");
  return SymmetricAdjacency::from_upper(n, binary::read_f64s(in, SymmetricAdjacency::parameter_count(n)));
}

}  // namespace rgnn
