#include <gtest/gtest.h>

#include <cmath>

#include "rgnn/diffcore.hpp"
#include "rgnn/errors.hpp"
#include "rgnn/random.hpp"

using namespace rgnn;

namespace {

ModelConfig small() {
  ModelConfig c;
  c.channels = 4;
  c.bands = 3;
  c.hidden = 2;
  c.classes = 3;
  c.steps = 2;
  return c;
}

// Loss by composing the forward pieces directly.
double reference_loss(const GradCheckSetup& s) {
  const auto prop = normalize(s.params.adjacency);
  std::vector<Vector> probs;
  std::vector<Matrix> src, tgt;
  for (std::size_t m = 0; m < s.batch.source.size(); ++m) {
    const auto t = forward(s.params, prop, s.batch.source[m], s.config, s.spec.training, s.batch.dropout_seeds[m]);
    probs.push_back(t.class_probs);
    const auto tt = forward(s.params, prop, s.batch.target_domain[m], s.config, false);
    const auto d = domain_forward(s.params, t.z, tt.z);
    src.push_back(d.source);
    tgt.push_back(d.target);
  }
  return kl_loss(probs, s.batch.targets) + l1_penalty(s.params.adjacency, s.spec.alpha) + domain_loss(src, tgt);
}

}  // namespace

TEST(EvaluateBatch, LossMatchesForwardComposition) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GradCheckSetup s = random_gradcheck_setup(small(), 3, seed);
    const LossEvaluation e = evaluate_batch(s.params, s.config, s.batch, s.spec, false);
    EXPECT_NEAR(e.loss.total, reference_loss(s), 1e-12);
    EXPECT_NEAR(e.loss.total, e.loss.kl + e.loss.l1 + e.loss.domain, 1e-12);
  }
}

TEST(EvaluateBatch, GradientsMatchFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const CompositeGradCheck r = check_composite_gradients(random_gradcheck_setup(small(), 2, seed));
    EXPECT_LT(r.max_relative_error, 1e-4) << "seed " << seed << " task " << r.task.worst_tensor << " domain "
                                          << r.domain.worst_tensor;
    EXPECT_EQ(r.task.checked, 26u);
  }
}

TEST(EvaluateBatch, LargerInstanceGradients) {
  ModelConfig c;
  c.channels = 9;
  c.bands = 5;
  c.hidden = 6;
  c.classes = 4;
  c.steps = 3;
  const CompositeGradCheck r = check_composite_gradients(random_gradcheck_setup(c, 3, 21));
  EXPECT_LT(r.max_relative_error, 1e-4);
}

TEST(EvaluateBatch, GraphLevelHeadGradients) {
  GradCheckSetup s = random_gradcheck_setup(small(), 3, 8);
  s.spec.domain = DomainHead::graph;
  const CompositeGradCheck r = check_composite_gradients(s);
  EXPECT_LT(r.max_relative_error, 1e-4);
}

TEST(EvaluateBatch, NoDomainHeadMeansZeroDomainGradient) {
  GradCheckSetup s = random_gradcheck_setup(small(), 2, 3);
  s.spec.domain = DomainHead::none;
  const LossEvaluation e = evaluate_batch(s.params, s.config, s.batch, s.spec);
  EXPECT_EQ(e.loss.domain, 0.0);
  EXPECT_EQ(e.domain_gradients, s.params.zeros_like());
  EXPECT_TRUE(e.task_gradients.w_domain.isZero(0.0));
}

TEST(EvaluateBatch, CorruptedAdjointIsCaught) {
  GradCheckSetup s = random_gradcheck_setup(small(), 2, 1);
  s.spec.corrupt_degree_adjoint = true;
  const CompositeGradCheck r = check_composite_gradients(s);
  EXPECT_GT(r.max_relative_error, 1e-4);
  EXPECT_EQ(r.task.worst_tensor, "adjacency");
}

TEST(EvaluateBatch, SingleNodeGraphAndNodeHeadsAgree) {
  ModelConfig c = small();
  c.channels = 1;
  GradCheckSetup s = random_gradcheck_setup(c, 3, 5);
  const LossEvaluation node = evaluate_batch(s.params, s.config, s.batch, s.spec, false);
  s.spec.domain = DomainHead::graph;
  const LossEvaluation graph = evaluate_batch(s.params, s.config, s.batch, s.spec, false);
  EXPECT_NEAR(node.loss.domain, graph.loss.domain, 1e-12);
}

TEST(EvaluateBatch, UniformDomainOutputsAtZeroDomainWeights) {
  GradCheckSetup s = random_gradcheck_setup(small(), 3, 2);
  s.params.w_domain.setZero();
  const LossEvaluation e = evaluate_batch(s.params, s.config, s.batch, s.spec, false);
  EXPECT_NEAR(e.loss.domain, 2.0 * 3 * 4 * std::log(2.0), 1e-12);
  s.spec.domain = DomainHead::graph;
  const LossEvaluation g = evaluate_batch(s.params, s.config, s.batch, s.spec, false);
  EXPECT_NEAR(g.loss.domain, 2.0 * 3 * std::log(2.0), 1e-12);
}

TEST(EvaluateBatch, ShapeChecks) {
  GradCheckSetup s = random_gradcheck_setup(small(), 2, 4);
  Batch b = s.batch;
  b.target_domain.pop_back();
  EXPECT_THROW(evaluate_batch(s.params, s.config, b, s.spec), ShapeError);
  b = s.batch;
  b.targets.pop_back();
  EXPECT_THROW(evaluate_batch(s.params, s.config, b, s.spec), ShapeError);
  b = s.batch;
  b.dropout_seeds.clear();
  EXPECT_THROW(evaluate_batch(s.params, s.config, b, s.spec), ShapeError);
}

TEST(EvaluateBatch, KlGradientOfLogitsClosedForm) {
  // With W^O = I-like probing: dKL/dlogits = p * sum(y) - y, checked through W^O's gradient for one sample.
  GradCheckSetup s = random_gradcheck_setup(small(), 1, 6);
  s.spec.domain = DomainHead::none;
  s.spec.alpha = 0.0;
  s.spec.training = false;
  const LossEvaluation e = evaluate_batch(s.params, s.config, s.batch, s.spec);
  const auto t = forward(s.params, normalize(s.params.adjacency), s.batch.source[0], s.config);
  const Vector dlogits = t.class_probs * s.batch.targets[0].sum() - s.batch.targets[0];
  const Matrix expected = t.pooled * dlogits.transpose();
  EXPECT_TRUE(e.task_gradients.w_out.isApprox(expected, 1e-12));
}

TEST(GradCheck, DeterministicPerSeed) {
  const auto a = check_composite_gradients(random_gradcheck_setup(small(), 2, 77));
  const auto b = check_composite_gradients(random_gradcheck_setup(small(), 2, 77));
  EXPECT_EQ(a.max_relative_error, b.max_relative_error);
}
