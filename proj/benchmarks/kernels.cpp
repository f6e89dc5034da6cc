#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "szego/cmv.hpp"
#include "szego/cocycle.hpp"
#include "szego/dos.hpp"
#include "szego/kam.hpp"
#include "szego/measures.hpp"

using namespace szego;

namespace {

VerblunskyModel cosineModel() { return VerblunskyModel(0.3, TrigPolynomial::cosine({1}), Frequency::golden()); }

void BM_TransferProduct(benchmark::State& state) {
  const auto m = cosineModel();
  const double x[] = {0.17};
  const cplx z = std::polar(1.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(transfer_product(m, x, z, state.range(0)));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TransferProduct)->RangeMultiplier(10)->Range(100, 100000)->Complexity(benchmark::oN);

void BM_Lyapunov(benchmark::State& state) {
  const auto m = cosineModel();
  const PhaseGrid phases = PhaseGrid::lowDiscrepancy(1, 8);
  Exec exec;
  exec.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(lyapunov_exponent(m, std::polar(1.0, 1.0), 10000, phases, exec));
}
BENCHMARK(BM_Lyapunov);

void BM_DosTruncation(benchmark::State& state) {
  const auto m = cosineModel();
  DosOptions opt;
  opt.exec.threads = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(dos_histogram(m, static_cast<int>(state.range(0)), 4, DosEstimator::truncation, opt));
}
BENCHMARK(BM_DosTruncation)->Arg(256)->Arg(1024);

void BM_SzegoZeros(benchmark::State& state) {
  const auto m = cosineModel();
  const double x[] = {0.0};
  const auto alpha = alpha_orbit(m, x, 1, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(szego_zeros(alpha));
}
BENCHMARK(BM_SzegoZeros)->Arg(64)->Arg(256);

void BM_KamStep(benchmark::State& state) {
  const VerblunskyModel m(1e-4, TrigPolynomial::cosine({1}), Frequency::golden());
  const auto split = szego_split(m, 2.0, 0.05);
  KamStepInput in;
  in.s0 = split.s0;
  in.f0 = split.f0;
  in.r = 0.05;
  in.rPrime = 0.025;
  in.gate.enforce = false;
  in.forceBranch = KamBranch::nonResonant;
  for (auto _ : state) benchmark::DoNotOptimize(kam_step(in));
}
BENCHMARK(BM_KamStep);

void BM_SchurCaratheodory(benchmark::State& state) {
  const auto m = cosineModel();
  const double x[] = {0.3};
  const cplx z = std::polar(0.99, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(schur_caratheodory(m, x, z, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_SchurCaratheodory)->Arg(256)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
