// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "helilab/kernels.hpp"
#include "helilab/spectral.hpp"

namespace {

using namespace helilab;

struct Vec3Data {
  std::vector<double> x, y, z;
  explicit Vec3Data(std::size_t n, unsigned seed) : x(n), y(n), z(n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = d(rng);
      y[i] = d(rng);
      z[i] = d(rng);
    }
  }
  kernels::Vec3View view() { return {x, y, z}; }
};

template <bool Parallel>
void BM_cross(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Vec3Data a(n, 1), b(n, 2), out(n, 3);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::parallel::cross(a.view(), b.view(), out.view());
    else
      kernels::serial::cross(a.view(), b.view(), out.view());
    benchmark::DoNotOptimize(out.x.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

template <bool Parallel>
void BM_normalize(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Vec3Data a(n, 1), out(n, 3);
  for (auto _ : state) {
    auto rep = Parallel ? kernels::parallel::normalize(a.view(), out.view())
                        : kernels::serial::normalize(a.view(), out.view());
    benchmark::DoNotOptimize(rep);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

template <bool Parallel>
void BM_sum_sq(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Vec3Data a(n, 1);
  for (auto _ : state) {
    double s = Parallel ? kernels::parallel::sum_sq(a.x) : kernels::serial::sum_sq(a.x);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

template <bool Parallel>
void BM_multiply(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<cplx> data(n, cplx(1.0, 0.5));
  std::vector<double> f(n, 0.999);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::parallel::multiply(data, f);
    else
      kernels::serial::multiply(data, f);
    benchmark::DoNotOptimize(data.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

void BM_forward_fft(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto grid = SpectralGrid::create(n, 16.0);
  const ScalarField f = sample(grid, [](double x, double y) { return std::sin(x) * std::cos(2 * y); });
  for (auto _ : state) {
    Spectrum s = spectral::forward(f);
    benchmark::DoNotOptimize(s.coeffs().data());
  }
}

constexpr std::int64_t kSmall = 64 * 64, kLarge = 512 * 512;

BENCHMARK(BM_cross<false>)->Arg(kSmall)->Arg(kLarge);
BENCHMARK(BM_cross<true>)->Arg(kSmall)->Arg(kLarge);
BENCHMARK(BM_normalize<false>)->Arg(kSmall)->Arg(kLarge);
BENCHMARK(BM_normalize<true>)->Arg(kSmall)->Arg(kLarge);
BENCHMARK(BM_sum_sq<false>)->Arg(kSmall)->Arg(kLarge);
BENCHMARK(BM_sum_sq<true>)->Arg(kSmall)->Arg(kLarge);
BENCHMARK(BM_multiply<false>)->Arg(kSmall)->Arg(kLarge);
BENCHMARK(BM_multiply<true>)->Arg(kSmall)->Arg(kLarge);
BENCHMARK(BM_forward_fft)->Arg(64)->Arg(128)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
