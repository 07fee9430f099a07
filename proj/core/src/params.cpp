#include "rgnn/params.hpp"

#include <string>

#include "rgnn/errors.hpp"

namespace rgnn {

namespace {

std::span<double> storage(Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<const double> storage(const Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }

bool same_shape(const Matrix& a, const Matrix& b) { return a.rows() == b.rows() && a.cols() == b.cols(); }

}  // namespace

ParamSet ParamSet::zeros_like() const {
  return {SymmetricAdjacency(adjacency.size(), 0.0), Matrix::Zero(w.rows(), w.cols()),
          Matrix::Zero(w_out.rows(), w_out.cols()), Matrix::Zero(w_domain.rows(), w_domain.cols())};
}

std::size_t ParamSet::parameter_count() const noexcept {
  return adjacency.upper().size() + static_cast<std::size_t>(w.size() + w_out.size() + w_domain.size());
}

void ParamSet::for_each_tensor(const std::function<void(std::string_view, std::span<double>)>& fn) {
  fn("adjacency", adjacency.upper());
  fn("w", storage(w));
  fn("w_out", storage(w_out));
  fn("w_domain", storage(w_domain));
}

void ParamSet::for_each_tensor(const std::function<void(std::string_view, std::span<const double>)>& fn) const {
  fn("adjacency", adjacency.upper());
  fn("w", storage(w));
  fn("w_out", storage(w_out));
  fn("w_domain", storage(w_domain));
}

void ParamSet::require_same_shape(const ParamSet& other) const {
  if (adjacency.size() != other.adjacency.size()) throw ShapeError("adjacency size mismatch");
  if (!same_shape(w, other.w)) throw ShapeError("w shape mismatch");
  if (!same_shape(w_out, other.w_out)) throw ShapeError("w_out shape mismatch");
  if (!same_shape(w_domain, other.w_domain)) throw ShapeError("w_domain shape mismatch");
}

void ParamSet::add_scaled(const ParamSet& other, double scale) {
  require_same_shape(other);
  auto a = adjacency.upper();
  auto b = other.adjacency.upper();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += scale * b[i];
  w += scale * other.w;
  w_out += scale * other.w_out;
  w_domain += scale * other.w_domain;
}

bool operator==(const ParamSet& a, const ParamSet& b) {
  auto eq = [](const Matrix& x, const Matrix& y) { return same_shape(x, y) && x == y; };
  return a.adjacency == b.adjacency && eq(a.w, b.w) && eq(a.w_out, b.w_out) && eq(a.w_domain, b.w_domain);
}

}  // namespace rgnn
