#include <benchmark/benchmark.h>

#include <random>

#include "rgnn/diffcore.hpp"
#include "rgnn/graph.hpp"
#include "rgnn/losses.hpp"
#include "rgnn/model.hpp"
#include "rgnn/optim.hpp"

using namespace rgnn;

namespace {

SymmetricAdjacency random_adjacency(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SymmetricAdjacency a(n);
  for (double& v : a.upper()) v = u(rng);
  return a;
}

ModelConfig model(std::size_t n) {
  ModelConfig m;
  m.channels = n;
  m.bands = 5;
  m.hidden = 32;
  m.classes = 3;
  m.steps = 2;
  return m;
}

struct Instance {
  ModelConfig config = model(62);
  ParamSet params;
  Batch batch;
  LossSpec spec{0.001, DomainHead::node, true};
};

Instance instance(std::size_t batch_size) {
  Instance in;
  in.params = xavier_init(in.config, 7);
  const auto n = static_cast<Eigen::Index>(in.config.channels);
  const auto d = static_cast<Eigen::Index>(in.config.bands);
  for (std::size_t k = 0; k < batch_size; ++k) {
    in.batch.source.push_back(Matrix::Random(n, d));
    in.batch.target_domain.push_back(Matrix::Random(n, d));
    in.batch.targets.push_back(convert_labels_seed(k % 3, 0.2));
    in.batch.dropout_seeds.push_back(k);
  }
  return in;
}

}  // namespace

static void BM_Propagate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto prop = normalize(random_adjacency(n, 1));
  const Matrix x = Matrix::Random(static_cast<Eigen::Index>(n), 5);
  for (auto _ : state) benchmark::DoNotOptimize(propagate(prop, x, 2));
}
BENCHMARK(BM_Propagate)->Arg(16)->Arg(62);

static void BM_EvaluateBatch(benchmark::State& state) {
  const Instance s = instance(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_batch(s.params, s.config, s.batch, s.spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvaluateBatch)->Arg(1)->Arg(16);

static void BM_AdamStep(benchmark::State& state) {
  const Instance s = instance(1);
  const LossEvaluation e = evaluate_batch(s.params, s.config, s.batch, s.spec);
  const ParamSet dir = composite_gradients(e.task_gradients, e.domain_gradients, 0.5);
  ParamSet p = s.params;
  AdamState st = AdamState::zeros_for(p);
  for (auto _ : state) adam_step(st, p, dir, AdamConfig{});
}
BENCHMARK(BM_AdamStep);
BENCHMARK_MAIN();
