// Serial reference kernels against their OpenMP variants, plus one replica
// ensemble at several thread counts.

#include <benchmark/benchmark.h>

#include <vector>

#include "spwave/analysis.hpp"
#include "spwave/kernels.hpp"
#include "spwave/spectral.hpp"

using namespace spwave;

namespace {

std::vector<double> ramp(std::size_t n) {
  std::vector<double> a(n);
  for (std::size_t k = 0; k < n; ++k) a[k] = 1.0 / static_cast<double>((k + 1) * (k + 1));
  return a;
}

void BM_SynthesizeSerial(benchmark::State& state) {
  const auto modes = static_cast<std::size_t>(state.range(0));
  SpectralBasis basis(1.0, modes);
  const auto a = ramp(modes);
  std::vector<double> out(basis.grid_size());
  for (auto _ : state) {
    kernels::synthesize_serial(basis.table(), modes, a, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(modes * basis.grid_size()));
}

void BM_SynthesizeParallel(benchmark::State& state) {
  const auto modes = static_cast<std::size_t>(state.range(0));
  SpectralBasis basis(1.0, modes);
  const auto a = ramp(modes);
  std::vector<double> out(basis.grid_size());
  for (auto _ : state) {
    kernels::synthesize_parallel(basis.table(), modes, a, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(modes * basis.grid_size()));
}

void BM_AnalyzeSerial(benchmark::State& state) {
  const auto modes = static_cast<std::size_t>(state.range(0));
  SpectralBasis basis(1.0, modes);
  const std::vector<double> samples(basis.grid_size(), 0.5);
  std::vector<double> out(modes);
  for (auto _ : state) {
    kernels::analyze_serial(basis.table(), modes, basis.quadrature_weight(), samples, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_AnalyzeParallel(benchmark::State& state) {
  const auto modes = static_cast<std::size_t>(state.range(0));
  SpectralBasis basis(1.0, modes);
  const std::vector<double> samples(basis.grid_size(), 0.5);
  std::vector<double> out(modes);
  for (auto _ : state) {
    kernels::analyze_parallel(basis.table(), modes, basis.quadrature_weight(), samples, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_Ensemble(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  ModelParams p;
  p.nu = 1e-2;
  p.steps = 512;
  const SpectralField u0(p.basis, {0.25});
  const ReplicaFn fn = [&](std::size_t, std::uint64_t seed) {
    const auto path = sample_path(p.noise, p.horizon, p.steps, seed);
    const auto full = simulate_full(p, path, u0, SpectralField(p.basis), Sampling::uniform(8, p.steps));
    const auto heat = simulate_heat(p, path, u0, Sampling::uniform(8, p.steps));
    return std::vector<double>{sup_error(full, heat).sup};
  };
  for (auto _ : state) benchmark::DoNotOptimize(ensemble(16, 1, fn, threads).mean);
}

}  // namespace

BENCHMARK(BM_SynthesizeSerial)->Arg(32)->Arg(128)->Arg(512);
BENCHMARK(BM_SynthesizeParallel)->Arg(32)->Arg(128)->Arg(512);
BENCHMARK(BM_AnalyzeSerial)->Arg(32)->Arg(128)->Arg(512);
BENCHMARK(BM_AnalyzeParallel)->Arg(32)->Arg(128)->Arg(512);
BENCHMARK(BM_Ensemble)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
