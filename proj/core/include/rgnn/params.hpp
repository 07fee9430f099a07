#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "rgnn/graph.hpp"
#include "rgnn/linalg.hpp"

namespace rgnn {

/// Trainable tensors. The same shape doubles as a gradient, direction or moment buffer.
struct ParamSet {
  SymmetricAdjacency adjacency;  // n(n+1)/2 upper-triangle parameters
  Matrix w;                      // d x d'
  Matrix w_out;                  // d' x C
  Matrix w_domain;               // d' x 2

  /// Same shapes, all zeros.
  ParamSet zeros_like() const;
  std::size_t parameter_count() const noexcept;

  /// Visits (name, contiguous storage) for adjacency, w, w_out, w_domain in that order.
  void for_each_tensor(const std::function<void(std::string_view, std::span<double>)>& fn);
  void for_each_tensor(const std::function<void(std::string_view, std::span<const double>)>& fn) const;

  /// Throws ShapeError unless every tensor matches `other`'s shape.
  void require_same_shape(const ParamSet& other) const;

  /// this += scale * other
  void add_scaled(const ParamSet& other, double scale);

  friend bool operator==(const ParamSet& a, const ParamSet& b);
};

}  // namespace rgnn
