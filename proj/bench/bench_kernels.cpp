#include <random>

#include <benchmark/benchmark.h>

#include "couplekit/kernels.hpp"

using namespace couplekit;

namespace {

Vector random_vector(std::size_t n, double lo, double hi, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

template <Vector (*F)(std::span<const double>)>
void BM_lag_maxima(benchmark::State& state) {
  Vector f = random_vector(static_cast<std::size_t>(state.range(0)), -1.0, 1.0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(F(f));
}

template <double (*F)(const Eigen::MatrixXd&, double, double)>
void BM_pair_family_max(benchmark::State& state) {
  const auto n = state.range(0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd b(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) b(i, j) = u(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(F(b, 1.0 / n, 0.5));
}

template <Vector (*F)(std::span<const double>, std::span<const double>, std::span<const double>)>
void BM_min_kernel_bounds(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Vector w0 = random_vector(n, 0.1, 10.0, 3), w1 = random_vector(n, 0.1, 10.0, 4);
  Vector a = random_vector(n, -1.0, 1.0, 5);
  for (auto _ : state) benchmark::DoNotOptimize(F(w0, w1, a));
}

template <std::vector<KResult> (*F)(const Couple&, std::span<const double>,
                                    std::span<const double>, Exponent, const KOptions&)>
void BM_k_on_grid(benchmark::State& state) {
  const std::size_t n = 8;
  Couple c = make_couple(n, random_vector(n, 0.5, 2.0, 6), random_vector(n, 0.5, 2.0, 7),
                         Exponent::finite(1.0), Exponent::finite(2.0));
  Vector a = random_vector(n, -1.0, 1.0, 8);
  Vector ts;
  for (int k = 0; k < state.range(0); ++k) ts.push_back(std::exp2(-8.0 + 16.0 * k / state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(F(c, a, ts, Exponent::finite(1.0), KOptions{}));
}

}  // namespace

BENCHMARK(BM_lag_maxima<serial::lag_maxima>)->Name("lag_maxima/serial")->Range(256, 8192);
BENCHMARK(BM_lag_maxima<parallel::lag_maxima>)->Name("lag_maxima/parallel")->Range(256, 8192);
BENCHMARK(BM_pair_family_max<serial::pair_family_max>)->Name("pair_family_max/serial")->Range(64, 1024);
BENCHMARK(BM_pair_family_max<parallel::pair_family_max>)->Name("pair_family_max/parallel")->Range(64, 1024);
BENCHMARK(BM_min_kernel_bounds<serial::min_kernel_bounds>)->Name("min_kernel_bounds/serial")->Range(64, 2048);
BENCHMARK(BM_min_kernel_bounds<parallel::min_kernel_bounds>)->Name("min_kernel_bounds/parallel")->Range(64, 2048);
BENCHMARK(BM_k_on_grid<serial::k_on_grid>)->Name("k_on_grid/serial")->Range(8, 64);
BENCHMARK(BM_k_on_grid<parallel::k_on_grid>)->Name("k_on_grid/parallel")->Range(8, 64);

BENCHMARK_MAIN();
