#include <random>

#include <benchmark/benchmark.h>

#include "hyperfuse/metrics.hpp"

namespace {

void BM_Evaluate(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  std::vector<double> wl(50);
  for (std::size_t b = 0; b < wl.size(); ++b) wl[b] = 400.0 + 40.0 * double(b);
  hyperfuse::SpectralCube ref(side, side, wl);
  std::mt19937 gen(6);
  std::uniform_real_distribution<float> dist(0.01f, 1.0f);
  for (auto& v : ref.values) v = dist(gen);
  auto est = ref;
  for (auto& v : est.values) v *= 1.01f;
  for (auto _ : state) benchmark::DoNotOptimize(hyperfuse::metrics::evaluate(ref, est));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ref.values.size()));
}
BENCHMARK(BM_Evaluate)->Arg(30)->Arg(300);

}  // namespace
