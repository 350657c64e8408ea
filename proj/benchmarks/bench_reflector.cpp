#include <benchmark/benchmark.h>

#include "csmap/raytracer.hpp"
#include "csmap/reflector.hpp"
#include "csmap/rng.hpp"
#include "csmap/scenes.hpp"

namespace {

using namespace csmap;

std::vector<FirstOrderObservation> observations(std::size_t count) {
  const SceneMesh mesh = builtin_scene("two-buildings");
  Rng rng(3);
  std::vector<FirstOrderObservation> obs;
  while (obs.size() < count) {
    const Vec3 gmt{rng.uniform(5, 75), rng.uniform(5, 55), 2.0};
    const Vec3 uav{rng.uniform(5, 75), rng.uniform(5, 55), rng.uniform(1, 10)};
    for (const PropagationPath& p : trace_first_order(gmt, uav, mesh)) {
      if (std::abs(std::cos(p.aoa.phi)) > 1e-6 &&
          std::abs(std::sin(p.aoa.theta)) > 1e-6) {
        obs.push_back({uav, gmt, p.delay, p.aoa});
      }
    }
  }
  obs.resize(count);
  return obs;
}

void BM_SolveClosedForm(benchmark::State& state) {
  const auto obs = observations(256);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_closed_form(obs[i++ % obs.size()]));
  }
}
BENCHMARK(BM_SolveClosedForm);

void BM_SolveParametric(benchmark::State& state) {
  const auto obs = observations(256);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_parametric(obs[i++ % obs.size()]));
  }
}
BENCHMARK(BM_SolveParametric);

}  // namespace
