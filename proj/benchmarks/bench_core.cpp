#include <benchmark/benchmark.h>

#include <random>

#include "semisplit/catalog.hpp"
#include "semisplit/drs.hpp"
#include "semisplit/linalg.hpp"
#include "semisplit/pppa.hpp"

using namespace semisplit;

static void BM_sym_eigen(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  linalg::GeneralMatrix b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = u(rng);
  const auto a = linalg::SymMatrix::from_general(b.transpose().multiply(b));
  for (auto _ : state) {
    benchmark::DoNotOptimize(linalg::sym_eigen(a));
  }
}
BENCHMARK(BM_sym_eigen)->Arg(4)->Arg(8)->Arg(16);

static void BM_spectral_radius_2x2(benchmark::State& state) {
  const auto h = toy_ppa_step_matrix(2.0, 1.0, 2.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(linalg::spectral_radius(h));
  }
}
BENCHMARK(BM_spectral_radius_2x2);

static void BM_piecewise_resolvent(benchmark::State& state) {
  const DrsProblem ns = nonsmooth_min_problem();
  std::mt19937_64 rng(2);
  const ResolventSelection det;
  double s = -3.0;
  for (auto _ : state) {
    s = s >= 3.0 ? -3.0 : s + 1e-3;
    benchmark::DoNotOptimize(resolvent(ns.a, 0.13, Vec{s}, det, rng));
  }
}
BENCHMARK(BM_piecewise_resolvent);

static void BM_rotational_resolvent(benchmark::State& state) {
  const ToyProblem toy = toy_ppa_problem(2.0, 1.0, true);
  std::mt19937_64 rng(3);
  const ResolventSelection det;
  double t = 0.0;
  for (auto _ : state) {
    t += 0.01;
    const Vec s{1.5 + 0.4 * std::sin(t), 0.9 * std::cos(t)};
    benchmark::DoNotOptimize(resolvent(toy.t, 1.0, s, det, rng));
  }
}
BENCHMARK(BM_rotational_resolvent);

static void BM_drs_step(benchmark::State& state) {
  const DrsProblem st = stationary_problem();
  std::mt19937_64 rng(4);
  const ResolventSelection det;
  Vec s{2.0};
  const double gamma = 11.0 / 60.0;
  for (auto _ : state) {
    const auto r = drs_step(st.a, st.b, s, gamma, 0.09, det, rng);
    s = r.snext;
    if (std::abs(s[0]) > 10.0 || std::abs(s[0]) < 1e-12) s[0] = 2.0;
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_drs_step);

static void BM_pppa_run_100(benchmark::State& state) {
  const ToyProblem toy = toy_ppa_problem(2.0, 1.0, true);
  const Preconditioner p = Preconditioner::identity(2);
  PPPAConfig cfg;
  cfg.lambda = LambdaRule::fixed(2.3);
  cfg.max_iters = 100;
  cfg.stop_tol = 0.0;
  cfg.validate_certificate = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_pppa(toy.t, p, toy.cert, Vec{1.4, -0.9}, cfg));
  }
}
BENCHMARK(BM_pppa_run_100);

BENCHMARK_MAIN();
