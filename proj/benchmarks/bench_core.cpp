#include <benchmark/benchmark.h>

#include "homscore/nullfit.hpp"
#include "homscore/resample.hpp"
#include "homscore/rng.hpp"
#include "homscore/scorestats.hpp"
#include "homscore/simharness.hpp"

using namespace homscore;

namespace {

Dataset make_data(int n, int m) {
  SimConfig cfg;
  cfg.model = SimModel::logistic;
  cfg.n = n;
  cfg.m = m;
  cfg.sigma1_sq = 0.0;
  std::mt19937_64 rng = make_engine(1234, 0, 0);
  return gen_logistic(cfg, rng);
}

}  // namespace

static void BM_fit_null(benchmark::State& state) {
  Dataset data = make_data(50, 5);
  for (auto _ : state) {
    NullFit fit = fit_null(data, FamilySpec::bernoulli());
    benchmark::DoNotOptimize(fit.beta);
  }
}
BENCHMARK(BM_fit_null);

static void BM_build_blocks(benchmark::State& state) {
  Dataset data = make_data(50, 5);
  WMatrix w = w_matrix_q2({1.1, 0.4});
  for (auto _ : state) {
    BlockCoefficients blocks = build_blocks(data, w);
    benchmark::DoNotOptimize(blocks.blocks.front()(0, 0));
  }
}
BENCHMARK(BM_build_blocks);

static void BM_profile(benchmark::State& state) {
  Dataset data = make_data(50, 5);
  FamilySpec family = FamilySpec::bernoulli();
  NullFit fit = fit_null(data, family);
  NuisanceGrid grid = make_grid({static_cast<int>(state.range(0)),
                                 static_cast<int>(state.range(1)), 15.0 / 16.0});
  for (auto _ : state) {
    ScoreProfile profile = compute_profile(data, family, fit, grid);
    benchmark::DoNotOptimize(profile.points.back().x_s);
  }
}
BENCHMARK(BM_profile)->Args({10, 7})->Args({20, 31});

static void BM_replicate(benchmark::State& state) {
  Dataset data = make_data(50, 5);
  FamilySpec family = FamilySpec::bernoulli();
  NullFit fit = fit_null(data, family);
  NuisanceGrid grid = make_grid({10, 7, 15.0 / 16.0});
  ScoreProfile profile = compute_profile(data, family, fit, grid);
  ResamplingPlan plan(data, family, fit, grid, profile);
  int r = 0;
  double s_o, s_p, s_s;
  for (auto _ : state) {
    plan.sup_replicate(7, r++, s_o, s_p, s_s);
    benchmark::DoNotOptimize(s_s);
  }
}
BENCHMARK(BM_replicate);

static void BM_run_resampling(benchmark::State& state) {
  Dataset data = make_data(50, 5);
  FamilySpec family = FamilySpec::bernoulli();
  NullFit fit = fit_null(data, family);
  NuisanceGrid grid = make_grid({10, 7, 15.0 / 16.0});
  ScoreProfile profile = compute_profile(data, family, fit, grid);
  ResamplingPlan plan(data, family, fit, grid, profile);
  for (auto _ : state) {
    NullReplicates reps = run_resampling(plan, static_cast<int>(state.range(0)), 7, 1);
    benchmark::DoNotOptimize(reps.s_s.sum());
  }
}
BENCHMARK(BM_run_resampling)->Arg(100)->Arg(1000);

BENCHMARK_MAIN();
