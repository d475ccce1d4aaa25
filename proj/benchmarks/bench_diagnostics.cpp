#include <benchmark/benchmark.h>

#include <cmath>

#include "gnireg/diagnostics.hpp"
#include "gnireg/spectrum.hpp"

using namespace gnireg;

static void BM_Dft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(0.37 * static_cast<double>(i));
  for (auto _ : state) benchmark::DoNotOptimize(amplitude_spectrum(x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Dft)->RangeMultiplier(4)->Range(256, 1 << 16)->Complexity(benchmark::oNLogN);

static void BM_NetworkSpectrum(benchmark::State& state) {
  RandomSource rs(1, 0);
  const auto net = Network::init(std::vector<std::size_t>{1, 256, 256, 256, 256, 256, 1}, Activation::relu, rs,
                                 InitScheme::he_uniform);
  for (auto _ : state) benchmark::DoNotOptimize(network_spectrum(net, Grid{}));
}
BENCHMARK(BM_NetworkSpectrum)->Unit(benchmark::kMillisecond);

static void BM_RemainderEstimate(benchmark::State& state) {
  RandomSource rs(2, 0);
  const auto net = Network::init(std::vector<std::size_t>{1, 64, 64, 64, 1}, Activation::sigmoid, rs);
  Batch batch{gaussian_matrix(rs, 32, 1, 1.0), gaussian_matrix(rs, 32, 1, 1.0)};
  const auto spec = NoiseSpec::uniform(net.depth(), NoiseMode::additive, 0.1);
  for (auto _ : state) {
    RandomSource draws(3, 0);
    benchmark::DoNotOptimize(estimate_remainder(net, batch, spec, LossKind::mse, 100, draws));
  }
}
BENCHMARK(BM_RemainderEstimate)->Unit(benchmark::kMillisecond);

static void BM_HessianTrace(benchmark::State& state) {
  RandomSource rs(4, 0);
  const auto net = Network::init(std::vector<std::size_t>{1, 64, 64, 1}, Activation::relu, rs,
                                 InitScheme::he_uniform);
  Batch batch{gaussian_matrix(rs, 64, 1, 1.0), gaussian_matrix(rs, 64, 1, 1.0)};
  for (auto _ : state) {
    RandomSource probes(5, 0);
    benchmark::DoNotOptimize(hessian_trace(net, batch, LossKind::mse, 8, probes));
  }
}
BENCHMARK(BM_HessianTrace)->Unit(benchmark::kMillisecond);
