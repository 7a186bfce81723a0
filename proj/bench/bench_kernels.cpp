// Serial reference vs OpenMP for the hot kernels. Run with
//   ./build/bench/bench_kernels --benchmark_counters_tabular=true
#include <benchmark/benchmark.h>

#include <random>

#include "pixelrl/actions.hpp"
#include "pixelrl/conv.hpp"
#include "pixelrl/reward_kernel.hpp"

using namespace pixelrl;

namespace {

std::vector<double> uniform(std::size_t n, std::uint64_t seed, double lo = -0.5, double hi = 0.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

Backend backend_of(const benchmark::State& st) { return st.range(0) ? Backend::OpenMP : Backend::Serial; }

// Middle layer of the default trunk: 64 -> 64, 3x3, dilation 2.
void BM_ConvForward(benchmark::State& st) {
  const int side = static_cast<int>(st.range(1));
  const ConvShape s{64, 64, 3, 2};
  Tensor x(64, side, side);
  x.data = uniform(x.size(), 1);
  const auto w = uniform(s.weight_count(), 2, -0.05, 0.05);
  const std::vector<double> b(64, 0.01);
  Tensor y;
  for (auto _ : st) {
    conv_forward(x, w, b, s, y, backend_of(st));
    benchmark::DoNotOptimize(y.data.data());
  }
  st.SetItemsProcessed(st.iterations() * side * side);
}

void BM_ConvBackward(benchmark::State& st) {
  const int side = static_cast<int>(st.range(1));
  const ConvShape s{64, 64, 3, 2};
  Tensor x(64, side, side), dy(64, side, side), dx;
  x.data = uniform(x.size(), 1);
  dy.data = uniform(dy.size(), 3);
  const auto w = uniform(s.weight_count(), 2, -0.05, 0.05);
  std::vector<double> dw(w.size()), db(64);
  for (auto _ : st) {
    conv_backward(x, w, dy, s, &dx, dw, db, backend_of(st));
    benchmark::DoNotOptimize(dx.data.data());
  }
  st.SetItemsProcessed(st.iterations() * side * side);
}

// Random per-pixel choices exercise every filter.
void BM_ApplyActionMap(benchmark::State& st) {
  const int side = static_cast<int>(st.range(1));
  const ActionSet set = ActionSet::build(ActionDomain::GrayFiltering);
  ImagePlane img(side, side, 1);
  img.data() = uniform(img.size(), 4, 0.0, 1.0);
  ActionMap am(side, side);
  std::mt19937_64 rng(5);
  for (auto& id : am.ids) id = static_cast<std::uint8_t>(rng() % set.size());
  for (auto _ : st) {
    ImagePlane out = apply_action_map(img, am, set, backend_of(st));
    benchmark::DoNotOptimize(out.data().data());
  }
  st.SetItemsProcessed(st.iterations() * side * side);
}

void BM_Conv2dReturn(benchmark::State& st) {
  const int side = static_cast<int>(st.range(1));
  ScalarField map(side, side);
  map.data() = uniform(map.size(), 6);
  RewardKernel k(33, true);
  k.weights() = uniform(k.weights().size(), 7);
  for (auto _ : st) {
    ScalarField out = conv2d_return(map, k, backend_of(st));
    benchmark::DoNotOptimize(out.data().data());
  }
  st.SetItemsProcessed(st.iterations() * side * side);
}

void sizes(benchmark::internal::Benchmark* b) {
  b->ArgNames({"omp", "side"});
  for (int omp : {0, 1})
    for (int side : {35, 70}) b->Args({omp, side});
  b->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_ConvForward)->Apply(sizes);
BENCHMARK(BM_ConvBackward)->Apply(sizes);
BENCHMARK(BM_ApplyActionMap)->Apply(sizes);
BENCHMARK(BM_Conv2dReturn)->Apply(sizes);

BENCHMARK_MAIN();
