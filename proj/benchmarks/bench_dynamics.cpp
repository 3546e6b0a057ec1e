#include <benchmark/benchmark.h>

#include "sea/dynamics.hpp"
#include "sea/equilibrium.hpp"
#include "sea/random.hpp"
#include "sea/statespace.hpp"

namespace {

void BM_SeaRate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  sea::Rng rng(1);
  const sea::EnergySpectrum spectrum(rng.levels(n, 0.0, 10.0));
  const auto p = sea::random_state(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(sea::sea_rate(p, spectrum));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SeaRate)->RangeMultiplier(4)->Range(4, 1024)->Complexity();

void BM_IntegrateRk4(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  sea::Rng rng(2);
  const sea::EnergySpectrum spectrum(rng.levels(n, 0.0, 10.0));
  const auto p = sea::random_state(rng, n);
  sea::IntegratorConfig cfg;
  cfg.t_end = 50.0;
  for (auto _ : state) benchmark::DoNotOptimize(sea::integrate(p, spectrum, {}, cfg));
}
BENCHMARK(BM_IntegrateRk4)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_IntegrateRk45(benchmark::State& state) {
  sea::Rng rng(3);
  const sea::EnergySpectrum spectrum(rng.levels(10, 0.0, 10.0));
  const auto p = sea::random_state(rng, 10);
  sea::IntegratorConfig cfg;
  cfg.method = sea::IntegrationMethod::rk45;
  cfg.t_end = 50.0;
  for (auto _ : state) benchmark::DoNotOptimize(sea::integrate(p, spectrum, {}, cfg));
}
BENCHMARK(BM_IntegrateRk45)->Unit(benchmark::kMillisecond);

void BM_BetaFromEnergy(benchmark::State& state) {
  sea::Rng rng(4);
  const sea::EnergySpectrum spectrum(rng.levels(64, 0.0, 10.0));
  double e = spectrum.min() + 0.1 * spectrum.range();
  for (auto _ : state) {
    benchmark::DoNotOptimize(sea::beta_from_energy(e, spectrum));
    e = e < spectrum.max() - 0.2 * spectrum.range() ? e + 1e-3 : spectrum.min() + 0.1 * spectrum.range();
  }
}
BENCHMARK(BM_BetaFromEnergy);

void BM_SmaxCurve(benchmark::State& state) {
  const sea::EnergySpectrum spectrum({0.0, 1.0, 2.0});
  for (auto _ : state) benchmark::DoNotOptimize(sea::smax_curve(spectrum, 512));
}
BENCHMARK(BM_SmaxCurve)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
