#include <benchmark/benchmark.h>

#include <cpref/measures.hpp>
#include <cpref/miner.hpp>
#include <cpref/pra.hpp>

#include "generators.hpp"

using namespace cpref;
using namespace cpref::testing;

namespace {

std::shared_ptr<const PreferenceDatabase> bench_db(std::size_t pairs) {
  Rng rng(1);
  return random_db(rng, letters(19), std::max<std::size_t>(pairs / 50, 100), pairs, 0.2);
}

}  // namespace

static void BM_PairIndexBuild(benchmark::State& state) {
  const auto db = bench_db(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(PairIndex(*db));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PairIndexBuild)->Arg(10'000)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

static void BM_Agreement(benchmark::State& state) {
  const auto db = bench_db(static_cast<std::size_t>(state.range(0)));
  const PairIndex index(*db);
  Rng rng(2);
  const auto rules = random_rules(rng, 256, 19);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(index.agreement(rules[i++ % rules.size()]));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Agreement)->Arg(10'000)->Arg(1'000'000)->Unit(benchmark::kMicrosecond);

static void BM_AvgInternalDistance(benchmark::State& state) {
  const auto db = bench_db(100'000);
  Rng rng(3);
  const auto rules = random_rules(rng, static_cast<std::size_t>(state.range(0)), 19);
  const Measures m(*db);
  (void)avg_internal_distance_ratio(rules, m);  // warm the cache
  for (auto _ : state) benchmark::DoNotOptimize(avg_internal_distance_ratio(rules, m));
}
BENCHMARK(BM_AvgInternalDistance)->Arg(10)->Arg(50)->Unit(benchmark::kMicrosecond);

static void BM_Mine(benchmark::State& state) {
  const auto db = bench_db(static_cast<std::size_t>(state.range(0)));
  MinerConfig cfg;
  cfg.min_support = 0.005;
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_rules(*db, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Mine)->Arg(1'000)->Arg(20'000)->Unit(benchmark::kMillisecond);

static void BM_Pra(benchmark::State& state) {
  const auto db = bench_db(50'000);
  Rng rng(4);
  const auto rules = RuleSet::in_order(random_rules(rng, static_cast<std::size_t>(state.range(0)), 19));
  const Measures m(*db);
  PraConfig cfg;
  cfg.mindis = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(pra_aggregate(rules, m, cfg));
}
BENCHMARK(BM_Pra)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
