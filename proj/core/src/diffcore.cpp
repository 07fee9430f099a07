#include "rgnn/diffcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rgnn/errors.hpp"
#include "rgnn/random.hpp"

namespace rgnn {

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void check_shapes(const ParamSet& params, const ModelConfig& config, const Batch& batch, const LossSpec& spec) {
  const auto n = static_cast<Eigen::Index>(config.channels);
  const auto d = static_cast<Eigen::Index>(config.bands);
  const auto h = static_cast<Eigen::Index>(config.hidden);
  const auto c = static_cast<Eigen::Index>(config.classes);
  if (params.adjacency.size() != config.channels) throw ShapeError("adjacency size differs from channel count");
  if (params.w.rows() != d || params.w.cols() != h) throw ShapeError("W must be bands x hidden");
  if (params.w_out.rows() != h || params.w_out.cols() != c) throw ShapeError("W^O must be hidden x classes");
  if (params.w_domain.rows() != h || params.w_domain.cols() != 2) throw ShapeError("W^D must be hidden x 2");
  if (batch.targets.size() != batch.source.size()) throw ShapeError("batch: one label distribution per source sample");
  if (spec.training && batch.dropout_seeds.size() != batch.source.size())
    throw ShapeError("batch: one dropout seed per source sample");
  if (spec.domain != DomainHead::none && batch.target_domain.size() != batch.source.size())
    throw ShapeError("batch: domain loss needs as many target samples as source samples");
  auto check_x = [&](const Matrix& x) {
    if (x.rows() != n || x.cols() != d) throw ShapeError("batch: sample must be channels x bands");
  };
  for (const auto& x : batch.source) check_x(x);
  for (const auto& x : batch.target_domain) check_x(x);
  for (const auto& y : batch.targets)
    if (y.size() != c) throw ShapeError("batch: label distribution length differs from class count");
}

}  // namespace

LossEvaluation evaluate_batch(const ParamSet& params, const ModelConfig& config, const Batch& batch,
                              const LossSpec& spec, bool with_gradients) {
  check_shapes(params, config, batch, spec);
  const auto n = static_cast<Eigen::Index>(config.channels);
  const auto d = static_cast<Eigen::Index>(config.bands);
  const bool use_domain = spec.domain != DomainHead::none;
  const std::size_t n_source = batch.source.size();
  const std::size_t n_target = use_domain ? batch.target_domain.size() : 0;
  const std::size_t total = n_source + n_target;
  const auto width = static_cast<Eigen::Index>(total) * d;

  LossEvaluation out;
  out.task_gradients = params.zeros_like();
  out.domain_gradients = params.zeros_like();

  const Matrix a = params.adjacency.to_dense();
  const Vector deg = degrees(params.adjacency);
  const Vector r = deg.array().rsqrt();
  const Matrix s = r.asDiagonal() * a * r.asDiagonal();
  const Matrix s_t = s.transpose();

  auto sample_x = [&](std::size_t m) -> const Matrix& {
    return m < n_source ? batch.source[m] : batch.target_domain[m - n_source];
  };

  // Propagation over all samples at once: block m occupies columns [m d, (m+1) d).
  std::vector<Matrix> prop(static_cast<std::size_t>(config.steps) + 1);
  prop[0].resize(n, width);
  for (std::size_t m = 0; m < total; ++m) prop[0].middleCols(static_cast<Eigen::Index>(m) * d, d) = sample_x(m);
  for (int k = 1; k <= config.steps; ++k) prop[static_cast<std::size_t>(k)] = s * prop[static_cast<std::size_t>(k - 1)];
  const Matrix& last = prop.back();

  Matrix d_prop_task = Matrix::Zero(n, width);
  Matrix d_prop_domain = Matrix::Zero(n, width);

  for (std::size_t m = 0; m < total; ++m) {
    const auto cols = static_cast<Eigen::Index>(m) * d;
    const Matrix z = last.middleCols(cols, d) * params.w;
    const Matrix relu = z.cwiseMax(0.0);
    const Vector pooled = relu.colwise().sum().transpose();
    const bool is_source = m < n_source;

    Matrix d_relu_task, d_relu_domain;
    if (is_source) {
      Vector mask = Vector::Ones(pooled.size());
      if (spec.training && config.dropout > 0.0)
        mask = dropout_mask(static_cast<std::size_t>(pooled.size()), config.dropout, batch.dropout_seeds[m]);
      const Vector hidden = pooled.cwiseProduct(mask);
      const Vector logits = params.w_out.transpose() * hidden;
      Vector log_probs;
      Vector probs = softmax(logits, &log_probs);
      const LabelDistribution& y = batch.targets[m];
      for (Eigen::Index c = 0; c < y.size(); ++c)
        if (y(c) > 0.0) out.loss.kl += y(c) * (std::log(y(c)) - log_probs(c));
      if (with_gradients) {
        const Vector d_logits = probs * y.sum() - y;
        out.task_gradients.w_out.noalias() += hidden * d_logits.transpose();
        const Vector d_pooled = (params.w_out * d_logits).cwiseProduct(mask);
        d_relu_task = Vector::Ones(n) * d_pooled.transpose();
      }
      out.class_probs.push_back(std::move(probs));
    }

    if (use_domain) {
      const Eigen::Index domain_col = is_source ? 0 : 1;
      if (spec.domain == DomainHead::node) {
        Matrix log_p;
        const Matrix p = softmax_rows(relu * params.w_domain, &log_p);
        out.loss.domain -= log_p.col(domain_col).sum();
        if (with_gradients) {
          Matrix dq = p;
          dq.col(domain_col).array() -= 1.0;
          out.domain_gradients.w_domain.noalias() += relu.transpose() * dq;
          d_relu_domain = dq * params.w_domain.transpose();
        }
      } else {
        const Matrix q = pooled.transpose() * params.w_domain;  // 1 x 2
        Matrix log_p;
        const Matrix p = softmax_rows(q, &log_p);
        out.loss.domain -= log_p(0, domain_col);
        if (with_gradients) {
          Matrix dq = p;
          dq(0, domain_col) -= 1.0;
          out.domain_gradients.w_domain.noalias() += pooled * dq;
          const Vector d_pooled = params.w_domain * dq.transpose();
          d_relu_domain = Vector::Ones(n) * d_pooled.transpose();
        }
      }
    }

    if (!with_gradients) continue;
    const Matrix active = (z.array() > 0.0).cast<double>().matrix();
    const auto x_hat = last.middleCols(cols, d);
    if (d_relu_task.size() > 0) {
      const Matrix dz = d_relu_task.cwiseProduct(active);
      out.task_gradients.w.noalias() += x_hat.transpose() * dz;
      d_prop_task.middleCols(cols, d).noalias() = dz * params.w.transpose();
    }
    if (d_relu_domain.size() > 0) {
      const Matrix dz = d_relu_domain.cwiseProduct(active);
      out.domain_gradients.w.noalias() += x_hat.transpose() * dz;
      d_prop_domain.middleCols(cols, d).noalias() = dz * params.w.transpose();
    }
  }

  out.loss.l1 = l1_penalty(params.adjacency, spec.alpha);
  out.loss.total = out.loss.kl + out.loss.l1 + out.loss.domain;
  if (!with_gradients) return out;

  // Back through S^L: P_k = S P_{k-1}.
  auto adjacency_gradient = [&](Matrix d_prop) {
    Matrix d_s = Matrix::Zero(n, n);
    if (total > 0) {
      for (int k = config.steps; k >= 1; --k) {
        d_s.noalias() += d_prop * prop[static_cast<std::size_t>(k - 1)].transpose();
        d_prop = s_t * d_prop;
      }
    }
    // S_ij = r_i A_ij r_j with r_i = deg_i^{-1/2} and deg_i = sum_j |A_ij|.
    Matrix d_a = r.asDiagonal() * d_s * r.asDiagonal();
    if (!spec.corrupt_degree_adjoint) {
      const Matrix weighted = d_s.cwiseProduct(a);
      const Vector d_r = weighted * r + weighted.transpose() * r;
      const Vector d_deg = -0.5 * d_r.cwiseProduct(r.array().cube().matrix());
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) d_a(i, j) += d_deg(i) * sign(a(i, j));
    }
    return d_a;
  };

  Matrix d_a_task = adjacency_gradient(std::move(d_prop_task));
  if (spec.alpha != 0.0)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) d_a_task(i, j) += spec.alpha * sign(a(i, j));
  out.task_gradients.adjacency =
      SymmetricAdjacency::from_upper(config.channels, SymmetricAdjacency::fold_gradient(d_a_task));
  if (use_domain)
    out.domain_gradients.adjacency = SymmetricAdjacency::from_upper(
        config.channels, SymmetricAdjacency::fold_gradient(adjacency_gradient(std::move(d_prop_domain))));
  return out;
}

GradCheckReport grad_check(const ParamSet& params, const ParamSet& analytic,
                           const std::function<double(const ParamSet&)>& loss, double h) {
  params.require_same_shape(analytic);
  GradCheckReport report;
  report.max_relative_error = 0.0;
  ParamSet work = params;

  std::vector<std::pair<std::string, std::span<const double>>> grads;
  analytic.for_each_tensor([&](std::string_view name, std::span<const double> g) { grads.emplace_back(name, g); });
  std::size_t tensor = 0;
  work.for_each_tensor([&](std::string_view name, std::span<double> values) {
    const auto g = grads[tensor++].second;
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double original = values[k];
      values[k] = original + h;
      const double plus = loss(work);
      values[k] = original - h;
      const double minus = loss(work);
      values[k] = original;
      const double numeric = (plus - minus) / (2.0 * h);
      const double rel = std::abs(g[k] - numeric) / std::max(1e-8, std::abs(g[k]) + std::abs(numeric));
      ++report.checked;
      if (rel > report.max_relative_error || !std::isfinite(rel)) {
        report.max_relative_error = std::isfinite(rel) ? rel : std::numeric_limits<double>::infinity();
        report.worst_tensor = std::string(name);
        report.worst_index = k;
        report.worst_analytic = g[k];
        report.worst_numeric = numeric;
      }
    }
  });
  return report;
}

GradCheckSetup random_gradcheck_setup(const ModelConfig& config, std::size_t batch_size, std::uint64_t seed,
                                      double h) {
  config.validate();
  const double margin = 10.0 * h;
  const auto n = static_cast<Eigen::Index>(config.channels);
  const auto d = static_cast<Eigen::Index>(config.bands);
  for (std::uint64_t attempt = 0; attempt < 10000; ++attempt) {
    Rng rng(derive_seed(seed, {streams::kInit, 100, attempt}));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    GradCheckSetup setup;
    setup.config = config;
    setup.beta = 0.5;
    setup.spec.alpha = 0.05;
    setup.spec.domain = DomainHead::node;
    setup.spec.training = true;

    SymmetricAdjacency adjacency(config.channels);
    bool ok = true;
    for (auto& v : adjacency.upper()) {
      v = unit(rng);
      ok = ok && std::abs(v) >= margin;
    }
    for (std::size_t i = 0; i < config.channels; ++i) adjacency.set(i, i, 1.0 + 0.25 * unit(rng));
    if (!ok) continue;
    setup.params = xavier_init(config, derive_seed(seed, {streams::kInit, 101, attempt}), adjacency);

    for (std::size_t b = 0; b < batch_size; ++b) {
      Matrix xs(n, d), xt(n, d);
      for (Eigen::Index i = 0; i < xs.size(); ++i) xs.data()[i] = gauss(rng);
      for (Eigen::Index i = 0; i < xt.size(); ++i) xt.data()[i] = gauss(rng) + 0.5;
      setup.batch.source.push_back(std::move(xs));
      setup.batch.target_domain.push_back(std::move(xt));
      const auto label = static_cast<std::size_t>(rng() % config.classes);
      setup.batch.targets.push_back(config.classes == 3   ? convert_labels_seed(label, 0.2)
                                    : config.classes == 4 ? convert_labels_seed4(label, 0.2)
                                                          : convert_label(LabelScheme::custom, config.classes, label, 0.0));
      setup.batch.dropout_seeds.push_back(derive_seed(seed, {streams::kDropout, attempt, b}));
    }

    // Reject instances with a ReLU pre-activation close enough to zero for the stencil to cross it.
    const NormalizedPropagator prop = normalize(setup.params.adjacency);
    auto near_kink = [&](const Matrix& x) {
      const Matrix z = propagate(prop, x, config.steps) * setup.params.w;
      return (z.array().abs() < margin).any();
    };
    for (const auto& x : setup.batch.source) ok = ok && !near_kink(x);
    for (const auto& x : setup.batch.target_domain) ok = ok && !near_kink(x);
    if (ok) return setup;
  }
  throw NumericError("could not draw a gradient-check instance away from ReLU kinks");
}

CompositeGradCheck check_composite_gradients(const GradCheckSetup& setup, double h) {
  const LossEvaluation eval = evaluate_batch(setup.params, setup.config, setup.batch, setup.spec);
  auto evaluate = [&](const ParamSet& p) { return evaluate_batch(p, setup.config, setup.batch, setup.spec, false).loss; };
  auto task = [&](const ParamSet& p) {
    const auto l = evaluate(p);
    return l.kl + l.l1;
  };
  auto domain = [&](const ParamSet& p) { return evaluate(p).domain; };
  auto reversed = [&](const ParamSet& p) {
    const auto l = evaluate(p);
    return l.kl + l.l1 - setup.beta * l.domain;
  };

  CompositeGradCheck out;
  out.task = grad_check(setup.params, eval.task_gradients, task, h);
  out.domain = grad_check(setup.params, eval.domain_gradients, domain, h);
  // Shared parameters follow d(task)/dtheta - beta d(domain)/dtheta; W^D is checked through `domain`.
  ParamSet directions = composite_gradients(eval.task_gradients, eval.domain_gradients, setup.beta);
  directions.w_domain = -setup.beta * eval.domain_gradients.w_domain;
  out.composite = grad_check(setup.params, directions, reversed, h);
  out.max_relative_error =
      std::max({out.task.max_relative_error, out.domain.max_relative_error, out.composite.max_relative_error});
  return out;
}

}  // namespace rgnn
