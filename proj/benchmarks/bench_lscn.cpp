#include <benchmark/benchmark.h>

#include "csmap/lscn.hpp"
#include "csmap/rng.hpp"

namespace {

using namespace csmap;

LscnModel bench_model(int k) {
  LscnModel model = init_model(Architecture{}, k, 5);
  model.scaler = FeatureScaler(Eigen::VectorXd::Constant(3 * k, -1.0),
                               Eigen::VectorXd::Constant(3 * k, 1.0));
  return model;
}

void BM_Forward(benchmark::State& state) {
  const int k = 9;
  const LscnModel model = bench_model(k);
  Rng rng(6);
  Eigen::VectorXd x(3 * k);
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(-1, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(model, x));
  }
}
BENCHMARK(BM_Forward);

void BM_Backward(benchmark::State& state) {
  const int k = 9;
  const LscnModel model = bench_model(k);
  Rng rng(7);
  Eigen::VectorXd x(3 * k);
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(-1, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(backward(model, x, 1));
  }
}
BENCHMARK(BM_Backward);

}  // namespace

BENCHMARK_MAIN();
