#include "vrstab/data.hpp"
#include "vrstab/kernels.hpp"
#include "vrstab/losses.hpp"

#include <benchmark/benchmark.h>

#include <map>

namespace {

using namespace vrstab;

struct Problem {
  Dataset data;
  LossModel model;
  Weights w;
};

const Problem& problem(std::size_t n) {
  static std::map<std::size_t, Problem> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  SyntheticSpec spec;
  spec.dimension = 64;
  spec.true_weights = Weights::Ones(64);
  spec.seed = 3;
  Problem p;
  p.data = generate_synthetic_logistic(spec, n, true);
  p.model = make_model(LossKind::kLogistic, p.data, 0.01);
  p.w = Weights::Constant(64, 0.1);
  return cache.emplace(n, std::move(p)).first->second;
}

void BM_RiskSerial(benchmark::State& state) {
  const Problem& p = problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::empirical_risk_serial(p.model, p.w, p.data));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RiskParallel(benchmark::State& state) {
  const Problem& p = problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::empirical_risk_parallel(p.model, p.w, p.data));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GradientSerial(benchmark::State& state) {
  const Problem& p = problem(static_cast<std::size_t>(state.range(0)));
  Weights g;
  for (auto _ : state) {
    kernels::full_gradient_serial(p.model, p.w, p.data, g);
    benchmark::DoNotOptimize(g.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GradientParallel(benchmark::State& state) {
  const Problem& p = problem(static_cast<std::size_t>(state.range(0)));
  Weights g;
  for (auto _ : state) {
    kernels::full_gradient_parallel(p.model, p.w, p.data, g);
    benchmark::DoNotOptimize(g.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_RiskSerial)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 16);
BENCHMARK(BM_RiskParallel)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 16);
BENCHMARK(BM_GradientSerial)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 16);
BENCHMARK(BM_GradientParallel)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 16);

}  // namespace

BENCHMARK_MAIN();
