#include <benchmark/benchmark.h>

#include "csmap/raytracer.hpp"
#include "csmap/rng.hpp"
#include "csmap/scenes.hpp"

namespace {

using namespace csmap;

void BM_SnapshotTwoBuildings(benchmark::State& state) {
  const SceneMesh mesh = builtin_scene("two-buildings");
  ChannelConfig cfg;
  cfg.max_order = static_cast<int>(state.range(0));
  Rng rng(1);
  std::vector<std::pair<Vec3, Vec3>> pairs;
  for (int i = 0; i < 64; ++i) {
    pairs.push_back({{rng.uniform(5, 75), rng.uniform(5, 55), 2.0},
                     {rng.uniform(5, 75), rng.uniform(5, 55), rng.uniform(1, 10)}});
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [gmt, uav] = pairs[i++ % pairs.size()];
    benchmark::DoNotOptimize(snapshot(gmt, uav, mesh, cfg));
  }
}
BENCHMARK(BM_SnapshotTwoBuildings)->Arg(0)->Arg(1)->Arg(2);

void BM_SegmentOcclusion(benchmark::State& state) {
  const SceneMesh mesh = builtin_scene("two-buildings");
  Rng rng(2);
  std::vector<std::pair<Vec3, Vec3>> pairs;
  for (int i = 0; i < 256; ++i) {
    pairs.push_back({{rng.uniform(0, 80), rng.uniform(0, 60), rng.uniform(0.5, 10)},
                     {rng.uniform(0, 80), rng.uniform(0, 60), rng.uniform(0.5, 10)}});
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [a, b] = pairs[i++ % pairs.size()];
    benchmark::DoNotOptimize(segment_occluded(a, b, mesh));
  }
}
BENCHMARK(BM_SegmentOcclusion);

}  // namespace
