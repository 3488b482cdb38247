#include <benchmark/benchmark.h>

#include <random>

#include <tdsrobust/collocation.hpp>
#include <tdsrobust/freqbounds.hpp>
#include <tdsrobust/functional.hpp>
#include <tdsrobust/lyapunov_matrix.hpp>
#include <tdsrobust/simulate.hpp>
#include <tdsrobust/spectrum.hpp>
#include <tdsrobust/sysmodel.hpp>

namespace {

using namespace tdsr;

TdsSystem bench_system() {
  Mat a0(2, 2), a1(2, 2);
  a0 << 0, 1, -1, -2;
  a1 << 0, 0, -1, 1;
  return TdsSystem(a0, a1, 1.0);
}

PerturbationStructure bench_structure() {
  return PerturbationStructure(Mat::Identity(2, 2), Mat::Identity(2, 2), Mat::Identity(2, 2));
}

void BM_HinfSweep(benchmark::State& state) {
  auto sys = bench_system();
  auto ps = bench_structure();
  auto cfg = SweepConfig::defaults(sys);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hinf_norm(sys, ps, cfg));
  }
}
BENCHMARK(BM_HinfSweep)->Unit(benchmark::kMillisecond);

void BM_GammaMax(benchmark::State& state) {
  auto sys = bench_system();
  auto ps = bench_structure();
  auto cfg = SweepConfig::defaults(sys);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gamma_max(sys, ps, cfg));
  }
}
BENCHMARK(BM_GammaMax)->Unit(benchmark::kMillisecond);

void BM_CertifyW(benchmark::State& state) {
  auto sys = bench_system();
  auto ps = bench_structure();
  auto cfg = SweepConfig::defaults(sys);
  auto sec = sector_norm_bound(0.08, ps.p(), ps.m());
  for (auto _ : state) {
    benchmark::DoNotOptimize(certify_w(sys, ps, sec, cfg));
  }
}
BENCHMARK(BM_CertifyW)->Unit(benchmark::kMillisecond);

void BM_BuildFunctional(benchmark::State& state) {
  auto sys = bench_system();
  auto ps = bench_structure();
  auto sec = sector_norm_bound(0.1, ps.p(), ps.m());
  auto disc = make_discretization(static_cast<int>(state.range(0)), sys.h);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_functional(sys, ps, sec, disc));
  }
}
BENCHMARK(BM_BuildFunctional)->Arg(16)->Arg(24)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_EvaluateV(benchmark::State& state) {
  auto sys = bench_system();
  auto ps = bench_structure();
  auto sec = sector_norm_bound(0.1, ps.p(), ps.m());
  auto disc = make_discretization(24, sys.h);
  auto lk = build_functional(sys, ps, sec, disc).first;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  Mat phi(2, disc.order + 1);
  for (int i = 0; i < phi.rows(); ++i)
    for (int j = 0; j < phi.cols(); ++j) phi(i, j) = gauss(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_V(lk, phi));
  }
}
BENCHMARK(BM_EvaluateV);

void BM_RightmostRoots(benchmark::State& state) {
  auto sys = bench_system();
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rightmost_roots(sys, order, 6));
  }
}
BENCHMARK(BM_RightmostRoots)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Integrate(benchmark::State& state) {
  auto sys = bench_system();
  auto ps = bench_structure();
  Mat gain = Mat::Zero(2, 4);
  gain(0, 0) = 0.08;
  gain(1, 1) = 0.08;
  auto nl = Nonlinearity::linear_gain(gain);
  auto phi0 = [](double) { return Vec::Ones(2); };
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(sys, ps, nl, phi0, 0.01, 10.0));
  }
}
BENCHMARK(BM_Integrate)->Unit(benchmark::kMillisecond);

void BM_DelayLyapunovMatrix(benchmark::State& state) {
  auto sys = bench_system();
  Mat w = Mat::Identity(2, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(delay_lyapunov_matrix(sys, w));
  }
}
BENCHMARK(BM_DelayLyapunovMatrix);

}  // namespace

BENCHMARK_MAIN();
