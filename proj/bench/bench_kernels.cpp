// Serial against OpenMP stencil kernels over grid sizes.
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "radvac/kernels.hpp"

namespace {

using namespace radvac::kernels;

struct Data {
  explicit Data(int n) : stencil(n, 1.0 / n, 4), f(n), r(n), out(n) {
    for (int j = 0; j < n; ++j) {
      r[j] = (j + 0.5) / n;
      f[j] = std::sin(3 * r[j]) * r[j];
    }
  }
  DerivativeStencil stencil;
  std::vector<double> f, r, out;
};

template <void (*K)(const DerivativeStencil&, const double*, int, double*)>
void BM_derivative(benchmark::State& state) {
  Data d(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    K(d.stencil, d.f.data(), -1, d.out.data());
    benchmark::DoNotOptimize(d.out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <void (*K)(const DerivativeStencil&, const double*, const double*, int, double*)>
void BM_divergence(benchmark::State& state) {
  Data d(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    K(d.stencil, d.f.data(), d.r.data(), -1, d.out.data());
    benchmark::DoNotOptimize(d.out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <void (*K)(const double*, int, int, double*)>
void BM_sixth(benchmark::State& state) {
  Data d(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    K(d.f.data(), static_cast<int>(d.f.size()), -1, d.out.data());
    benchmark::DoNotOptimize(d.out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

#define SIZES RangeMultiplier(4)->Range(256, 1 << 18)

BENCHMARK(BM_derivative<derivative_serial>)->SIZES;
BENCHMARK(BM_derivative<derivative_parallel>)->SIZES;
BENCHMARK(BM_divergence<divergence_serial>)->SIZES;
BENCHMARK(BM_divergence<divergence_parallel>)->SIZES;
BENCHMARK(BM_sixth<sixth_difference_serial>)->SIZES;
BENCHMARK(BM_sixth<sixth_difference_parallel>)->SIZES;

}  // namespace

BENCHMARK_MAIN();
