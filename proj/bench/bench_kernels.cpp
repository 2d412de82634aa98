// Serial reference vs OpenMP kernel on estimator-shaped workloads.
#include <benchmark/benchmark.h>

#include "varcalc/catalog.hpp"
#include "varcalc/estimators.hpp"
#include "varcalc/kernels.hpp"

using namespace varcalc;

namespace {

kernels::IndexFn quotient_workload(int n) {
  static const CompositeProblem p = random_nlp(3, 4, 3).problem();
  static const Evaluable f = make_evaluable(p, 0.0);
  return [n](int i) {
    Vec x = Vec::Zero(4);
    x(i % 4) = 1e-3 * (1 + i % n);
    return f(x).value();
  };
}

void BM_EvaluateSerial(benchmark::State& st) {
  const int count = static_cast<int>(st.range(0));
  const auto fn = quotient_workload(count);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::evaluate_serial(count, fn));
  st.SetItemsProcessed(st.iterations() * count);
}

void BM_EvaluateParallel(benchmark::State& st) {
  const int count = static_cast<int>(st.range(0));
  const auto fn = quotient_workload(count);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::evaluate_parallel(count, fn));
  st.SetItemsProcessed(st.iterations() * count);
}

void BM_SecondSubderivative(benchmark::State& st) {
  kernels::set_backend(st.range(0) ? kernels::Backend::kParallel : kernels::Backend::kSerial);
  const CompositeProblem p = random_qp(5, 4).problem();
  const Evaluable f = make_evaluable(p);
  GridSchedule s;
  s.levels = 8;
  for (auto _ : st) benchmark::DoNotOptimize(est_second_subderivative(f, p.x_bar(), Vec::Zero(4), Vec::Ones(4), s));
  kernels::set_backend(kernels::Backend::kParallel);
}

}  // namespace

BENCHMARK(BM_EvaluateSerial)->Arg(256)->Arg(4096);
BENCHMARK(BM_EvaluateParallel)->Arg(256)->Arg(4096);
BENCHMARK(BM_SecondSubderivative)->Arg(0)->Arg(1);
BENCHMARK_MAIN();
