// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "o3v/core_math.hpp"
#include "o3v/green.hpp"
#include "o3v/kernels.hpp"

using namespace o3v;

namespace {

constexpr double kL = 2.0 * std::numbers::pi;

Grid smooth_grid(const TorusDomain& d) {
  Grid g(d);
  for (int i = 0; i < d.n1(); ++i) {
    for (int j = 0; j < d.n2(); ++j) g(i, j) = -2.0 + std::sin(i * d.h1()) * std::cos(j * d.h2());
  }
  return g;
}

template <bool Omp>
void BM_green(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TorusDomain d(kL, kL, n, n);
  const TorusGreen g(kL, kL);
  Grid out(d);
  for (auto _ : state) {
    if constexpr (Omp) {
      kernels::omp::accumulate_green(g, d, {1.0, 2.0}, -4.0 * std::numbers::pi, out);
    } else {
      kernels::serial::accumulate_green(g, d, {1.0, 2.0}, -4.0 * std::numbers::pi, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * d.size());
}

template <bool Omp>
void BM_density(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TorusDomain d(kL, kL, n, n);
  const Grid u = smooth_grid(d);
  Grid out(d);
  const Kernel k(1.0, Nonlinearity::SigmaO3);
  auto fn = [&k](std::size_t, double x) { return k.f(x); };
  for (auto _ : state) {
    if constexpr (Omp) {
      kernels::omp::map(u, out, fn);
    } else {
      kernels::serial::map(u, out, fn);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * d.size());
}

template <bool Omp>
void BM_dot(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TorusDomain d(kL, kL, n, n);
  const Grid a = smooth_grid(d), b = smooth_grid(d);
  for (auto _ : state) {
    double s = Omp ? kernels::omp::dot(a, b) : kernels::serial::dot(a, b);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * d.size());
}

template <bool Omp>
void BM_max_abs(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TorusDomain d(kL, kL, n, n);
  const Grid a = smooth_grid(d);
  for (auto _ : state) {
    double s = Omp ? kernels::omp::max_abs(a) : kernels::serial::max_abs(a);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * d.size());
}

}  // namespace

BENCHMARK(BM_green<false>)->Name("green/serial")->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_green<true>)->Name("green/omp")->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_density<false>)->Name("density/serial")->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_density<true>)->Name("density/omp")->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_dot<false>)->Name("dot/serial")->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_dot<true>)->Name("dot/omp")->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_max_abs<false>)->Name("max_abs/serial")->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_max_abs<true>)->Name("max_abs/omp")->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
