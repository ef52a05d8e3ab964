#include <random>

#include <benchmark/benchmark.h>

#include "hyperfuse/segment.hpp"

namespace {

void BM_FcmBlock(benchmark::State& state) {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> x(9);
  for (auto& v : x) v = dist(gen);
  const auto c = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hyperfuse::segment::fcm(x, c, {}));
}
BENCHMARK(BM_FcmBlock)->DenseRange(1, 4);

void BM_SegmentSuperpixel(benchmark::State& state) {
  std::mt19937 gen(4);
  std::uniform_real_distribution<float> dist(0.0f, 1.0f);
  hyperfuse::PanImage pan(3, 3);
  for (auto& v : pan.values) v = dist(gen);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hyperfuse::segment::segment_superpixel(pan, {0, 0}, 3, 3, {}));
  }
}
BENCHMARK(BM_SegmentSuperpixel);

}  // namespace
