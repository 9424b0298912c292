#include <benchmark/benchmark.h>

#include "weilbc/characters.hpp"
#include "weilbc/normmap.hpp"

using namespace weilbc;

namespace {

std::vector<GElem> samples(const Group& g, int count) {
  Rng rng(7);
  std::vector<GElem> out;
  for (int k = 0; k < count; ++k) out.push_back(g.random(rng));
  return out;
}

// args: n, m
void BM_BuildRepresentation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  auto t = Tower::build(3, 1, m);
  for (auto _ : state) {
    WeilRepresentation rep(t, n, m, t->one());
    benchmark::DoNotOptimize(rep.extended_trace(0, Group(GroupKind::Jacobi, n, t, m).identity()));
  }
}
BENCHMARK(BM_BuildRepresentation)->Args({1, 2})->Args({1, 4})->Args({2, 2})->Unit(benchmark::kMillisecond);

void BM_ExtendedTrace(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  auto t = Tower::build(3, 1, m);
  Group g(GroupKind::Jacobi, n, t, m);
  WeilRepresentation rep(t, n, m, t->one());
  const auto xs = samples(g, 64);
  std::size_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(rep.extended_trace(1, xs[k++ % xs.size()]));
}
BENCHMARK(BM_ExtendedTrace)->Args({1, 2})->Args({1, 4})->Args({2, 2});

void BM_GyojaNorm(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  auto t = Tower::build(3, 1, m);
  Group g(GroupKind::Jacobi, 1, t, m);
  GyojaNorm norm(g, choose_t(1, m));
  const auto xs = samples(g, 64);
  std::size_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(norm(xs[k++ % xs.size()]));
}
BENCHMARK(BM_GyojaNorm)->Arg(2)->Arg(3)->Arg(4);

void BM_TwistedClasses(benchmark::State& state) {
  auto t = Tower::build(3, static_cast<int>(state.range(0)), 2);
  Group g(GroupKind::Sp, 1, t, 2);
  for (auto _ : state) benchmark::DoNotOptimize(twisted_classes(g, 1).num_classes());
}
BENCHMARK(BM_TwistedClasses)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_TorusVirtual(benchmark::State& state) {
  auto t = Tower::build(3, 1, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(torus_virtual_check(t, t->one()).pass);
}
BENCHMARK(BM_TorusVirtual)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
