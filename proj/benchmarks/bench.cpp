#include <benchmark/benchmark.h>

#include "survscore/cox.hpp"
#include "survscore/forest.hpp"
#include "survscore/metrics.hpp"
#include "survscore/scorecard.hpp"
#include "survscore/synth.hpp"

namespace {

survscore::SurvivalDataset make_cohort(std::size_t n) {
  survscore::SynthSpec spec;
  spec.n = n;
  spec.normal_coefs = {0.8, 0.6, 0.4};
  spec.n_noise_normal = 7;
  spec.censor_rate = 0.025;
  spec.seed = 7;
  return survscore::generate_synthetic(spec);
}

void BM_GrowForest(benchmark::State& state) {
  auto ds = make_cohort(static_cast<std::size_t>(state.range(0)));
  survscore::ForestParams params;
  params.n_trees = 50;
  params.max_candidate_cuts = 32;
  params.seed = 1;
  for (auto _ : state) {
    auto forest = survscore::grow_forest(ds, params);
    benchmark::DoNotOptimize(forest.trees.size());
  }
}
BENCHMARK(BM_GrowForest)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_PermutationImportance(benchmark::State& state) {
  auto ds = make_cohort(static_cast<std::size_t>(state.range(0)));
  survscore::ForestParams params;
  params.n_trees = 50;
  params.max_candidate_cuts = 32;
  params.seed = 1;
  auto forest = survscore::grow_forest(ds, params);
  for (auto _ : state) {
    auto ranking = survscore::permutation_importance(forest, ds);
    benchmark::DoNotOptimize(ranking.entries.size());
  }
}
BENCHMARK(BM_PermutationImportance)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_FitCox(benchmark::State& state) {
  auto ds = make_cohort(static_cast<std::size_t>(state.range(0)));
  std::vector<std::string> vars = {"x1", "x2", "x3", "n1", "n2"};
  const double quantiles[] = {0.05, 0.2, 0.8, 0.95};
  auto cutoffs = survscore::derive_cutoffs(ds, vars, quantiles);
  for (auto _ : state) {
    auto derivation = survscore::derive_scores(ds, vars, cutoffs);
    benchmark::DoNotOptimize(derivation.card.max_total);
  }
}
BENCHMARK(BM_FitCox)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_IntegratedAuc(benchmark::State& state) {
  auto ds = make_cohort(static_cast<std::size_t>(state.range(0)));
  std::vector<double> scores(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) scores[i] = ds.column("x1").numeric[i];
  double horizon = 0;
  for (std::size_t i = 0; i < ds.n(); ++i)
    if (ds.status[i]) horizon = std::max(horizon, ds.times[i]);
  for (auto _ : state) {
    double v = survscore::iauc(scores, ds.times, ds.status, horizon,
                               survscore::RiskOrientation::higher_is_riskier);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_IntegratedAuc)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
