#include <benchmark/benchmark.h>

#include "gnireg/noise.hpp"
#include "gnireg/regulariser.hpp"

using namespace gnireg;

namespace {

Network relu_net(std::size_t width, std::size_t hidden_layers) {
  std::vector<std::size_t> widths = {1};
  for (std::size_t i = 0; i < hidden_layers; ++i) widths.push_back(width);
  widths.push_back(1);
  RandomSource rs(1, 0);
  return Network::init(widths, Activation::relu, rs, InitScheme::he_uniform);
}

Batch sinusoid_batch(Eigen::Index n) {
  RandomSource rs(2, 0);
  Batch b{gaussian_matrix(rs, static_cast<std::size_t>(n), 1, 1.0),
          gaussian_matrix(rs, static_cast<std::size_t>(n), 1, 1.0)};
  return b;
}

}  // namespace

static void BM_Forward(benchmark::State& state) {
  const auto net = relu_net(static_cast<std::size_t>(state.range(0)), 5);
  const auto batch = sinusoid_batch(64);
  for (auto _ : state) benchmark::DoNotOptimize(predict(net, batch.inputs));
}
BENCHMARK(BM_Forward)->Arg(64)->Arg(256);

static void BM_NoisedForward(benchmark::State& state) {
  const auto net = relu_net(static_cast<std::size_t>(state.range(0)), 5);
  const auto batch = sinusoid_batch(64);
  const auto spec = NoiseSpec::uniform(net.depth(), NoiseMode::additive, 0.1);
  RandomSource rs(3, 0);
  for (auto _ : state) benchmark::DoNotOptimize(noised_output(net, batch.inputs, spec, rs));
}
BENCHMARK(BM_NoisedForward)->Arg(64)->Arg(256);

static void BM_ParamGradient(benchmark::State& state) {
  const auto net = relu_net(static_cast<std::size_t>(state.range(0)), 5);
  const auto batch = sinusoid_batch(64);
  for (auto _ : state) benchmark::DoNotOptimize(param_gradient(net, batch, LossKind::mse));
}
BENCHMARK(BM_ParamGradient)->Arg(64)->Arg(256);

static void BM_LayerJacobians(benchmark::State& state) {
  const auto net = relu_net(static_cast<std::size_t>(state.range(0)), 5);
  const auto batch = sinusoid_batch(64);
  for (auto _ : state) {
    const auto trace = forward(net, batch.inputs);
    benchmark::DoNotOptimize(layer_jacobians(net, trace));
  }
}
BENCHMARK(BM_LayerJacobians)->Arg(64)->Arg(256);

static void BM_ExplicitObjective(benchmark::State& state) {
  const auto net = relu_net(static_cast<std::size_t>(state.range(0)), 5);
  const auto batch = sinusoid_batch(64);
  const auto spec = NoiseSpec::uniform(net.depth(), NoiseMode::additive, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(explicit_objective(net, batch, spec, LossKind::mse, RegVariant::mse));
  }
}
BENCHMARK(BM_ExplicitObjective)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_ExplicitObjectiveCe(benchmark::State& state) {
  RandomSource rs(4, 0);
  const auto net = Network::init(std::vector<std::size_t>{2, 64, 64, 10}, Activation::relu, rs,
                                 InitScheme::he_uniform);
  Batch batch{gaussian_matrix(rs, 32, 2, 1.0), Matrix::Zero(32, 10)};
  for (Eigen::Index i = 0; i < 32; ++i) batch.targets(i, i % 10) = 1.0;
  const auto spec = NoiseSpec::uniform(net.depth(), NoiseMode::additive, 0.1);
  const auto variant = static_cast<RegVariant>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(explicit_objective(net, batch, spec, LossKind::cross_entropy, variant));
  }
}
BENCHMARK(BM_ExplicitObjectiveCe)
    ->Arg(static_cast<int>(RegVariant::ce_diag))
    ->Arg(static_cast<int>(RegVariant::ce_full));
