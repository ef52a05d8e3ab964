#include <random>

#include <benchmark/benchmark.h>

#include "hyperfuse/unmix.hpp"

namespace {

Eigen::MatrixXd mixture(Eigen::Index bands, Eigen::Index pixels, Eigen::Index p) {
  std::mt19937 gen(1);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd s(bands, p), a(p, pixels);
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = dist(gen);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = dist(gen);
  return s * a;
}

void BM_NmfIterations(benchmark::State& state) {
  const auto pixels = state.range(0);
  const auto x = mixture(50, pixels, 5);
  hyperfuse::unmix::NmfConfig cfg;
  cfg.endmembers = 5;
  cfg.max_iter = 50;
  cfg.tol = 1e-300;
  cfg.threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(hyperfuse::unmix::nmf(x, cfg));
  state.SetItemsProcessed(state.iterations() * cfg.max_iter);
}
BENCHMARK(BM_NmfIterations)->Args({100, 1})->Args({2500, 1})->Args({2500, 4})->Unit(benchmark::kMillisecond);

void BM_SuccessiveProjection(benchmark::State& state) {
  const auto x = mixture(50, state.range(0), 5);
  for (auto _ : state) benchmark::DoNotOptimize(hyperfuse::unmix::successive_projection_init(x, 5));
}
BENCHMARK(BM_SuccessiveProjection)->Arg(100)->Arg(2500);

}  // namespace
