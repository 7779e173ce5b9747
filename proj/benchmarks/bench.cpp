#include <benchmark/benchmark.h>

#include "magfrac/bv.hpp"
#include "magfrac/constants.hpp"
#include "magfrac/harness.hpp"
#include "magfrac/kernels.hpp"

using namespace magfrac;

namespace {

void BM_PnormPow(benchmark::State& state) {
  CVec z(3);
  z[0] = {0.3, -0.7};
  z[1] = {1.1, 0.2};
  z[2] = {-0.4, 0.9};
  double p = 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pnorm_pow(z, p));
    p = p == 2.0 ? 1.0 : 2.0;
  }
}
BENCHMARK(BM_PnormPow);

void BM_QConstant(benchmark::State& state) {
  SphereRule rule = SphereRule::make(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(q_constant(2.0, static_cast<int>(state.range(0)), rule));
}
BENCHMARK(BM_QConstant)->Arg(2)->Arg(3);

void BM_FractionalEnergy1D(benchmark::State& state) {
  Domain d = Domain::interval(0, 1, state.range(0));
  auto u = ComplexField::gaussian(d, Vec{0.5}, 0.4);
  auto A = MagneticPotential::radial(1, 0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(fractional_magnetic_energy(u, A, d, 0.8, 2.0).value);
}
BENCHMARK(BM_FractionalEnergy1D)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_FractionalEnergy2D(benchmark::State& state) {
  Domain d = Domain::rect(0, 1, 0, 1, state.range(0), state.range(0));
  auto u = ComplexField::gaussian(d, Vec{0.0, 0.0}, 1.0);
  auto A = MagneticPotential::landau(2, 1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(fractional_magnetic_energy(u, A, d, 0.8, 2.0).value);
}
BENCHMARK(BM_FractionalEnergy2D)->Arg(12)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_BvDual2D(benchmark::State& state) {
  Domain d = Domain::rect(-1, 1, -1, 1, state.range(0), state.range(0));
  auto u = ComplexField::indicator(d, ShapeSet::disk(Vec{0.0, 0.0}, 0.5));
  auto A = MagneticPotential::landau(2, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(bv_dual(u, A, d).total);
}
BENCHMARK(BM_BvDual2D)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Mollify1D(benchmark::State& state) {
  Domain d = Domain::interval(-1, 1, 256);
  auto u = ComplexField::gaussian(d, Vec{0.0}, 0.4);
  Mollifier m(1, 8 * d.width(0));
  for (auto _ : state) benchmark::DoNotOptimize(mollify(u, m));
}
BENCHMARK(BM_Mollify1D)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
