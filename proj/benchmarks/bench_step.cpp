#include <benchmark/benchmark.h>

#include <vector>

#include "cxtlms/scenario.hpp"
#include "cxtlms/tlms.hpp"

using namespace cxtlms;

namespace {

constexpr std::size_t kStream = 4096;

void BM_Step(benchmark::State& state, ArchitectureKind kind) {
  const ScenarioConfig sc;
  const auto x = gen_colored_noise(sc.ar_coeff, kStream, 1);
  const auto y = simulate_target(x, synth_duplexer(sc.taps, 2), sc.snr_db, 3);
  auto est = make_estimator(kind, sc.estimator_params(kind), sc.discretizer(), 4);
  std::vector<IndexVector> idx;
  for (const auto& v : x) idx.push_back(complex_index(v, sc.discretizer()));
  std::vector<ModeDiagnostics> diag;
  std::size_t n = 0;
  for (auto _ : state) {
    diag.clear();
    const Complex y_hat = est->forward(idx[n]);
    est->update(y.observed[n] - y_hat, diag);
    benchmark::DoNotOptimize(y_hat);
    n = (n + 1) % kStream;
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_Forward(benchmark::State& state, ArchitectureKind kind) {
  const ScenarioConfig sc;
  auto est = make_estimator(kind, sc.estimator_params(kind), sc.discretizer(), 4);
  const auto x = gen_colored_noise(sc.ar_coeff, kStream, 1);
  std::vector<IndexVector> idx;
  for (const auto& v : x) idx.push_back(complex_index(v, sc.discretizer()));
  std::size_t n = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(est->forward(idx[n]));
    n = (n + 1) % kStream;
  }
}

template <typename T>
void BM_CpdEval(benchmark::State& state) {
  Rng rng(5);
  const auto rank = static_cast<std::size_t>(state.range(0));
  const auto t = random_cpd<T>({32, 32}, rank, 0.9, 1.1, rng);
  std::size_t i = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cpd_eval(t, {i, 33 - i}));
    i = i % 32 + 1;
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_Step, tlms2r, ArchitectureKind::Tlms2R);
BENCHMARK_CAPTURE(BM_Step, ttlms, ArchitectureKind::Ttlms);
BENCHMARK_CAPTURE(BM_Step, ctlms, ArchitectureKind::Ctlms);
BENCHMARK_CAPTURE(BM_Forward, tlms2r, ArchitectureKind::Tlms2R);
BENCHMARK_CAPTURE(BM_Forward, ttlms, ArchitectureKind::Ttlms);
BENCHMARK_CAPTURE(BM_Forward, ctlms, ArchitectureKind::Ctlms);
BENCHMARK_TEMPLATE(BM_CpdEval, double)->Arg(1)->Arg(10)->Arg(40);
BENCHMARK_TEMPLATE(BM_CpdEval, Complex)->Arg(1)->Arg(10)->Arg(40);
BENCHMARK_MAIN();
