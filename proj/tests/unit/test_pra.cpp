#include <gtest/gtest.h>

#include <algorithm>

#include <cpref/pra.hpp>

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracle.hpp"

using namespace cpref;
using cpref::testing::R;

namespace {

struct Fixture : ::testing::Test {
  std::shared_ptr<const PreferenceDatabase> db = cpref::testing::sample_db();
  const AttributeUniverse& u = db->universe();
  Measures m{*db};
  Rule de_b = R({"D"}, {"E"}, {"B"}, u);
  Rule dc = R({"D"}, {"C"}, {}, u);
  Rule ac_b = R({"A"}, {"C"}, {"B"}, u);
  RuleSet three = RuleSet::in_order({de_b, dc, ac_b});
};

PraConfig with_mindis(double x) {
  PraConfig cfg;
  cfg.mindis = x;
  return cfg;
}

}  // namespace

TEST_F(Fixture, KeepsAllThreeAtQuarter) {
  auto res = pra_aggregate(three, m, with_mindis(0.25));
  ASSERT_EQ(res.rules.size(), 3u);
  EXPECT_EQ(to_text(res.rules[0], u), "D > C | NULL");
  EXPECT_EQ(to_text(res.rules[1], u), "A > C | B");
  EXPECT_EQ(to_text(res.rules[2], u), "D > E | B");
  ASSERT_TRUE(res.trace.seed_pair);
  EXPECT_EQ(res.trace.seed_pair->first, dc);
  EXPECT_EQ(res.trace.seed_pair->second, de_b);
  EXPECT_EQ(res.trace.seed_avgdis, (Ratio{2, 5}));
  ASSERT_EQ(res.trace.additions.size(), 1u);
  EXPECT_EQ(res.trace.additions[0].rule, ac_b);
  EXPECT_EQ(res.trace.additions[0].avgdis, (Ratio{4, 15}));
  EXPECT_EQ(res.trace.final_avgdis, (Ratio{4, 15}));
}

TEST_F(Fixture, StopsAtPointThree) {
  auto res = pra_aggregate(three, m, with_mindis(0.3));
  ASSERT_EQ(res.rules.size(), 2u);
  EXPECT_TRUE(res.rules.contains(de_b));
  EXPECT_TRUE(res.rules.contains(dc));
  EXPECT_TRUE(res.trace.additions.empty());
}

TEST_F(Fixture, UnreachableThresholdGivesEmptyOutput) {
  auto res = pra_aggregate(three, m, with_mindis(0.9));
  EXPECT_TRUE(res.rules.empty());
  EXPECT_FALSE(res.trace.seed_pair);
}

TEST_F(Fixture, InputOrderDoesNotMatter) {
  auto a = pra_aggregate(RuleSet::in_order({ac_b, de_b, dc}), m, with_mindis(0.25));
  auto b = pra_aggregate(three, m, with_mindis(0.25));
  EXPECT_EQ(a.rules, b.rules);
}

TEST_F(Fixture, ResolveMindis) {
  EXPECT_EQ(resolve_mindis(three, m, with_mindis(0.25)), 0.25);
  EXPECT_NEAR(resolve_mindis(three, m, PraConfig{}), 1.5 * (0.4 + 0.8 + 0.4) / 3, 1e-15);
  EXPECT_NEAR(resolve_mindis(RuleSet::in_order({dc}), m, PraConfig{}), 1.2, 1e-15);
  try {
    (void)resolve_mindis(RuleSet{}, m, PraConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyRuleset);
  }
  EXPECT_THROW((void)resolve_mindis(three, m, with_mindis(-1)), Error);
}

TEST_F(Fixture, TooFewRules) {
  try {
    (void)pra_aggregate(RuleSet::in_order({dc}), m, with_mindis(0.1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooFewRules);
  }
}

TEST(PraAutoMindis, MeanOfConsensusSupports) {
  const double supports[] = {0.0551, 0.0102, 0.0212, 0.0112, 0.0101, 0.0148, 0.0115, 0.0105, 0.0163,
                             0.0142, 0.0221, 0.0490, 0.1363, 0.1149, 0.0182, 0.0122, 0.0559, 0.0496,
                             0.0249, 0.0281, 0.0129, 0.0190, 0.0550, 0.0145, 0.0249, 0.0249, 0.0242,
                             0.0312, 0.0291, 0.0124, 0.0134, 0.0253, 0.0257, 0.0102, 0.0101, 0.0126};
  double total = 0;
  for (double s : supports) total += s;
  EXPECT_NEAR(PraConfig::kAutoFactor * total / 36, 0.0430, 5e-5);
}

// Greedy optimality and threshold safety, re-verified from the trace with the oracle.
TEST(PraProperty, TraceInvariantsOnRandomInstances) {
  cpref::testing::Rng rng(31337);
  for (int round = 0; round < 200; ++round) {
    auto u = cpref::testing::letters(4 + cpref::testing::draw(rng, 4));
    auto db = cpref::testing::random_db(rng, u, 8 + cpref::testing::draw(rng, 10), 10 + cpref::testing::draw(rng, 40));
    auto rules = RuleSet::in_order(cpref::testing::random_rules(rng, 2 + cpref::testing::draw(rng, 7), u->size()));
    if (rules.size() < 2) continue;
    Measures m(*db);
    PraConfig cfg;
    if (round % 2) cfg.mindis = 0.02 * static_cast<double>(cpref::testing::draw(rng, 10));
    auto res = pra_aggregate(rules, m, cfg);
    const double mindis = res.trace.mindis;
    const auto odb = oracle::to_oracle(*db);
    auto avg = [&](const std::vector<Rule>& s) { return oracle::avg_internal_distance(oracle::to_oracle(s, *u), odb); };

    if (!res.trace.seed_pair) {
      EXPECT_TRUE(res.rules.empty());
      for (std::size_t i = 0; i < rules.size(); ++i) {
        for (std::size_t j = i + 1; j < rules.size(); ++j) EXPECT_LE(avg({rules[i], rules[j]}).value(), mindis);
      }
      continue;
    }
    std::vector<Rule> sa{res.trace.seed_pair->first, res.trace.seed_pair->second};
    const auto seed = avg(sa);
    EXPECT_GT(seed.value(), mindis);
    for (std::size_t i = 0; i < rules.size(); ++i) {
      for (std::size_t j = i + 1; j < rules.size(); ++j) EXPECT_FALSE(avg({rules[i], rules[j]}) > seed);
    }
    for (const auto& step : res.trace.additions) {
      sa.push_back(step.rule);
      const auto got = avg(sa);
      EXPECT_EQ(static_cast<std::int64_t>(step.avgdis.num) * got.den, got.num * static_cast<std::int64_t>(step.avgdis.den));
      EXPECT_GT(got.value(), mindis);
      sa.pop_back();
      for (const auto& cand : rules) {
        if (std::find(sa.begin(), sa.end(), cand) != sa.end()) continue;
        sa.push_back(cand);
        EXPECT_FALSE(avg(sa) > got);
        sa.pop_back();
      }
      sa.push_back(step.rule);
    }
    // Nothing left clears the threshold.
    for (const auto& cand : rules) {
      if (std::find(sa.begin(), sa.end(), cand) != sa.end()) continue;
      sa.push_back(cand);
      EXPECT_LE(avg(sa).value(), mindis);
      sa.pop_back();
    }
    EXPECT_EQ(res.rules.size(), sa.size());
    for (const auto& r : sa) EXPECT_TRUE(rules.contains(r));
  }
}
