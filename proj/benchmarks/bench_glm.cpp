#include <benchmark/benchmark.h>

#include "ngkl/bayes_glm.hpp"
#include "ngkl/experiments.hpp"

namespace {

void BM_PolynomialEvidence(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  ngkl::PolySweepConfig config;
  const auto sample = ngkl::simulate_polynomial(config, ngkl::RngStream(0, 0));
  const ngkl::GlmDataset data(sample.y, ngkl::build_poly_design(sample.x, order));
  const auto prior = ngkl::poly_sweep_prior(order);
  for (auto _ : state) benchmark::DoNotOptimize(ngkl::log_model_evidence(data, prior));
}
BENCHMARK(BM_PolynomialEvidence)->Arg(1)->Arg(5)->Arg(20);

void BM_DatasetWithFullNoisePrecision(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const ngkl::Matrix x = ngkl::Matrix::Random(n, 4);
  const ngkl::Vector y = ngkl::Vector::Random(n);
  ngkl::Matrix b = ngkl::Matrix::Random(n, n);
  const ngkl::SpdMatrix p(ngkl::Matrix(b * b.transpose() + static_cast<double>(n) * ngkl::Matrix::Identity(n, n)));
  for (auto _ : state) benchmark::DoNotOptimize(ngkl::GlmDataset(y, x, p));
}
BENCHMARK(BM_DatasetWithFullNoisePrecision)->Arg(50)->Arg(200);

void BM_PolySweep(benchmark::State& state) {
  ngkl::PolySweepConfig config;
  config.n_simulations = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ngkl::run_poly_sweep(config));
}
BENCHMARK(BM_PolySweep)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_CvStudy(benchmark::State& state) {
  ngkl::CvStudyConfig config;
  config.n_replications = 10;
  for (auto _ : state) benchmark::DoNotOptimize(ngkl::run_cv_study(config));
}
BENCHMARK(BM_CvStudy)->Unit(benchmark::kMillisecond);

}  // namespace
