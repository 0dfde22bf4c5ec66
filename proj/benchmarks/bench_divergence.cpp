#include <benchmark/benchmark.h>

#include "ngkl/divergence.hpp"
#include "ngkl/numerics.hpp"

namespace {

ngkl::NormalGammaParams make_ng(Eigen::Index k, double shift) {
  ngkl::Matrix b = ngkl::Matrix::Random(k, k);
  ngkl::Matrix lambda = b * b.transpose() + static_cast<double>(k) * ngkl::Matrix::Identity(k, k);
  return ngkl::NormalGammaParams(ngkl::Vector::Constant(k, shift), ngkl::SpdMatrix(lambda),
                                 2.0 + shift, 1.5);
}

void BM_LogGamma(benchmark::State& state) {
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ngkl::log_gamma(x));
    x = x < 1e4 ? x * 1.7 : 0.1;
  }
}
BENCHMARK(BM_LogGamma);

void BM_Digamma(benchmark::State& state) {
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ngkl::digamma(x));
    x = x < 1e4 ? x * 1.7 : 0.1;
  }
}
BENCHMARK(BM_Digamma);

void BM_KlGamma(benchmark::State& state) {
  const ngkl::GammaParams p(2.5, 1.2), q(1.3, 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(ngkl::kl_gamma(p, q));
}
BENCHMARK(BM_KlGamma);

void BM_KlNormalGamma(benchmark::State& state) {
  const Eigen::Index k = state.range(0);
  const auto p = make_ng(k, 0.0), q = make_ng(k, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(ngkl::kl_normal_gamma(p, q));
}
BENCHMARK(BM_KlNormalGamma)->Arg(1)->Arg(5)->Arg(20)->Arg(100);

void BM_KlMonteCarloNg(benchmark::State& state) {
  const auto p = make_ng(5, 0.0), q = make_ng(5, 0.5);
  const auto n = static_cast<std::size_t>(state.range(0));
  const ngkl::RngStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(ngkl::kl_monte_carlo_ng(p, q, n, rng));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KlMonteCarloNg)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
