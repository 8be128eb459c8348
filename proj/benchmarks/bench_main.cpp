/* Microbenchmarks for the inner-loop primitives: prox steps, simplex
 * projection, sphere sampling, gradient surrogates, and the equilibrium
 * solver on a small instance. */

#include <benchmark/benchmark.h>

#include <vector>

#include "smdkit/online.hpp"
#include "smdkit/problems.hpp"
#include "smdkit/prox.hpp"
#include "smdkit/rng.hpp"
#include "smdkit/traffic.hpp"
#include "smdkit/zeroth_order.hpp"

namespace {

using namespace smdkit;

std::vector<double> ramp(std::size_t n, double scale) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = scale * static_cast<double>(i % 17) / 17.0;
  }
  return v;
}

void BM_MirrorStepEntropic(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  ProxGeometry geometry(ProxKind::entropic_simplex, n);
  std::vector<double> x = geometry.start_point();
  std::vector<double> v = ramp(n, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(geometry.mirror_step(x, v, 0.1));
  }
}
BENCHMARK(BM_MirrorStepEntropic)->Arg(10)->Arg(100)->Arg(1000);

void BM_MirrorStepEuclideanSimplex(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  ProxGeometry geometry(ProxKind::euclidean_simplex, n);
  std::vector<double> x = geometry.start_point();
  std::vector<double> v = ramp(n, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(geometry.mirror_step(x, v, 0.1));
  }
}
BENCHMARK(BM_MirrorStepEuclideanSimplex)->Arg(10)->Arg(100)->Arg(1000);

void BM_ProjectToSimplex(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  Rng rng(7);
  std::vector<double> y(n);
  for (double& v : y) v = rng.uniform(-1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_to_simplex(y));
  }
}
BENCHMARK(BM_ProjectToSimplex)->Arg(10)->Arg(100)->Arg(1000);

void BM_SampleSphere(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  Rng rng(11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_sphere(n, rng));
  }
}
BENCHMARK(BM_SampleSphere)->Arg(10)->Arg(100)->Arg(1000);

void BM_TwoPointGradient(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<double> c = ramp(n, 0.5);
  SyntheticValueProblem problem(SyntheticValueProblem::Shape::quadratic, c,
                                0.05, 0.0, 1.0, 2.0, 1.8, 1.0);
  ProxGeometry geometry(ProxKind::euclidean_simplex, n);
  std::vector<double> x = geometry.start_point();
  Rng rng(13);
  for (auto _ : state) {
    std::vector<double> e = sample_sphere(n, rng);
    benchmark::DoNotOptimize(two_point_gradient(problem, x, 0.05, e, rng));
  }
}
BENCHMARK(BM_TwoPointGradient)->Arg(10)->Arg(100);

void BM_ExpWeightsStep(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  std::vector<double> l = ramp(n, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(exp_weights_step(x, l, 0.05));
  }
}
BENCHMARK(BM_ExpWeightsStep)->Arg(2)->Arg(100);

void BM_SolveDualSmall(benchmark::State& state) {
  RoadNetwork net = random_small_network(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_dual(net, 0.1, 1e-7, 100000));
  }
}
BENCHMARK(BM_SolveDualSmall);

void BM_PathCosts(benchmark::State& state) {
  RoadNetwork net = random_small_network(2);
  std::vector<double> x = net.uniform_path_flows();
  for (auto _ : state) {
    benchmark::DoNotOptimize(path_costs(net, x));
  }
}
BENCHMARK(BM_PathCosts);

}  // namespace

BENCHMARK_MAIN();
