#include <random>

#include <benchmark/benchmark.h>

#include "hyperfuse/fuse.hpp"

namespace {

struct Scene {
  hyperfuse::SpectralCube lowres;
  hyperfuse::PanImage pan;
  hyperfuse::unmix::EndmemberModel model;
};

Scene random_scene(std::size_t side) {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Scene s;
  s.lowres = hyperfuse::SpectralCube(side, side, {500, 600, 700});
  s.pan = hyperfuse::PanImage(side * 3, side * 3);
  for (auto& v : s.pan.values) v = static_cast<float>(dist(gen));
  auto& m = s.model;
  m.samples = side;
  m.lines = side;
  m.wavelengths_nm = {500, 600, 700};
  m.signatures = Eigen::MatrixXd::Random(3, 4).cwiseAbs();
  m.abundances.resize(4, static_cast<Eigen::Index>(side * side));
  for (Eigen::Index n = 0; n < m.abundances.cols(); ++n) {
    for (Eigen::Index k = 0; k < 4; ++k) m.abundances(k, n) = dist(gen) < 0.5 ? 0.0 : dist(gen);
    if (m.abundances.col(n).sum() == 0.0) m.abundances(0, n) = 1.0;
    m.abundances.col(n) /= m.abundances.col(n).sum();
  }
  return s;
}

void BM_MatchSegments(benchmark::State& state) {
  const std::vector<double> area{0.4, 0.3, 0.2, 0.1};
  const std::vector<double> ab{0.15, 0.35, 0.3, 0.2};
  for (auto _ : state) benchmark::DoNotOptimize(hyperfuse::fuse::match_segments(area, ab));
}
BENCHMARK(BM_MatchSegments);

void BM_FuseScene(benchmark::State& state) {
  const auto s = random_scene(static_cast<std::size_t>(state.range(0)));
  hyperfuse::fuse::FusionConfig cfg;
  cfg.threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(hyperfuse::fuse::fuse_scene(s.lowres, s.pan, s.model, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_FuseScene)->Args({10, 1})->Args({100, 1})->Args({100, 4})->Unit(benchmark::kMillisecond);

}  // namespace
