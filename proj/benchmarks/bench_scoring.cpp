#include <benchmark/benchmark.h>

#include <cpref/belief.hpp>

#include "generators.hpp"

using namespace cpref;
using namespace cpref::testing;

namespace {

struct Setup {
  std::shared_ptr<const PreferenceDatabase> db;
  std::unique_ptr<BeliefSystem> system;
  RuleSet rules;

  Setup(std::size_t pairs, std::size_t n_rules) {
    Rng rng(10);
    auto u = letters(19);
    db = random_db(rng, u, 20'000, pairs, 0.2);
    auto all = random_rules(rng, n_rules + 25, 19);
    system = std::make_unique<BeliefSystem>(RuleSet::in_order({all.begin(), all.begin() + 25}), db);
    rules = RuleSet::in_order({all.begin() + 25, all.end()});
  }
};

template <class Fn>
void score(benchmark::State& state, const Fn& fn) {
  const Setup s(static_cast<std::size_t>(state.range(0)), 1000);
  ScoreOptions opt;
  opt.jobs = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(score_ruleset(s.rules, *s.system, fn, *s.db, opt));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.rules.size()));
}

}  // namespace

static void BM_ScoreCorrelation(benchmark::State& state) { score(state, CorrelationBelief{}); }
BENCHMARK(BM_ScoreCorrelation)->Args({100'000, 1})->Args({1'000'000, 1})->Args({1'000'000, 0})->Unit(benchmark::kMillisecond);

static void BM_ScoreCosine(benchmark::State& state) { score(state, CosineBelief{}); }
BENCHMARK(BM_ScoreCosine)->Args({100'000, 1})->Unit(benchmark::kMillisecond);

static void BM_CosineBelief(benchmark::State& state) {
  Rng rng(11);
  const auto rules = random_rules(rng, 64, 19, 2, 2);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cosine_belief(rules[i % 64], rules[(i * 7 + 3) % 64]));
    ++i;
  }
}
BENCHMARK(BM_CosineBelief);
