#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include <cpref/belief.hpp>

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracle.hpp"

using namespace cpref;
using cpref::testing::R;

namespace {

struct BeliefSample : ::testing::Test {
  std::shared_ptr<const PreferenceDatabase> db = cpref::testing::sample_db();
  const AttributeUniverse& u = db->universe();
  Rule de_b = R({"D"}, {"E"}, {"B"}, u);
  Rule de = R({"D"}, {"E"}, {}, u);
  Rule dc = R({"D"}, {"C"}, {}, u);
  Rule ac_b = R({"A"}, {"C"}, {"B"}, u);
};

}  // namespace

TEST_F(BeliefSample, CosineDerivedValues) {
  EXPECT_NEAR(cosine_belief(de_b, de_b), 1.1, 1e-12);
  EXPECT_NEAR(cosine_belief(de_b, de), 2.7 / std::sqrt(6.0), 1e-12);
  EXPECT_NEAR(cosine_belief(de_b, de), 1.1023, 5e-5);
  EXPECT_EQ(cosine_belief(de, ac_b), 0.0);
  // Both contexts empty: bare weights apply.
  EXPECT_NEAR(cosine_belief(de, de), 1.5, 1e-12);
}

TEST_F(BeliefSample, CorrelationDerivedValue) {
  const double want = 0.12 / (std::sqrt(0.24) * 0.4);
  EXPECT_NEAR(correlation_belief(de_b, dc, *db), want, 1e-12);
  EXPECT_NEAR(correlation_belief(de_b, dc, *db), 0.6124, 5e-5);
  EXPECT_NEAR(correlation_belief(de_b, de_b, *db), 1.0, 1e-12);
  EXPECT_EQ(correlation_belief(R({"A"}, {"E"}, {"C"}, u), dc, *db), 0.0);
}

TEST_F(BeliefSample, CorrelationNeedsTwoPairs) {
  auto tiny = db->with_pairs({db->pairs()[0]});
  try {
    (void)correlation_belief(de_b, dc, tiny);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DatabaseTooSmall);
  }
}

TEST_F(BeliefSample, SystemLevelScores) {
  BeliefSystem system(RuleSet::in_order({dc}), db);
  CorrelationBelief cov;
  const double b = belief_to_system(de_b, system, cov);
  const double d = deviation_to_system(de_b, system, cov);
  EXPECT_NEAR(b, 0.6124, 5e-5);
  EXPECT_NEAR(d, -0.3876, 5e-5);
  auto eta = interestingness(b, d);
  EXPECT_EQ(eta.branch, Branch::Generalized);
  EXPECT_EQ(eta.eta, b);

  auto scored = score_ruleset(RuleSet::in_order({de_b}), system, cov, *db);
  ASSERT_EQ(scored.size(), 1u);
  EXPECT_NEAR(scored[0].belief, 0.6124, 5e-5);
  EXPECT_NEAR(scored[0].deviation, -0.3876, 5e-5);
  EXPECT_EQ(scored[0].eta, scored[0].belief);
  EXPECT_EQ(scored[0].support, 0.4);
  EXPECT_EQ(scored[0].confidence, 1.0);
}

TEST_F(BeliefSample, SelfMembership) {
  BeliefSystem single(RuleSet::in_order({dc}), db);
  CorrelationBelief cov;
  EXPECT_NEAR(belief_to_system(dc, single, cov), 1.0, 1e-12);
  EXPECT_NEAR(deviation_to_system(dc, single, cov), 0.0, 1e-12);

  BeliefSystem system(RuleSet::in_order({dc, de_b}), db);
  for (const auto& s : score_ruleset(system.rules(), system, cov, *db)) {
    EXPECT_NEAR(s.belief, 1.0, 1e-12);
    EXPECT_EQ(s.branch, Branch::Generalized);
  }
}

TEST_F(BeliefSample, OrthogonalCosineDeviationIsMinusOne) {
  BeliefSystem system(RuleSet::in_order({ac_b}), db);
  CosineBelief cos;
  EXPECT_EQ(deviation_to_system(de, system, cos), -1.0);
}

TEST(Interestingness, BranchCases) {
  auto a = interestingness(0.6124, -0.3876);
  EXPECT_EQ(a.branch, Branch::Generalized);
  auto b = interestingness(0.0, -1.0);
  EXPECT_EQ(b.branch, Branch::Personalized);
  EXPECT_EQ(b.eta, -1.0);
  auto c = interestingness(0.5, -0.5);
  EXPECT_EQ(c.branch, Branch::Generalized);
  EXPECT_EQ(c.eta, 0.5);
}

TEST(Interestingness, BranchLawOnRandomInputs) {
  cpref::testing::Rng rng(17);
  for (int i = 0; i < 10000; ++i) {
    const double b = static_cast<double>(rng() % 2001) / 1000.0;
    const double d = static_cast<double>(rng() % 4001) / 1000.0 - 2.0;
    auto eta = interestingness(b, d);
    EXPECT_EQ(std::abs(eta.eta), std::max(b, std::abs(d)));
    EXPECT_EQ(eta.branch == Branch::Generalized, b >= std::abs(d));
    EXPECT_EQ(eta.eta < 0, eta.branch == Branch::Personalized && d < 0);
  }
}

TEST(DeviationForms, MeanMinusOneAndCompat) {
  std::vector<double> beliefs{0.2, 0.4, 0.9};
  EXPECT_NEAR(deviation_to_system(beliefs), 1.5 / 3 - 1, 1e-15);
  EXPECT_NEAR(deviation_to_system(beliefs, DeviationForm::SumMinusOneOverN), 0.5 / 3, 1e-15);
  EXPECT_EQ(belief_to_system(beliefs), 0.9);
  EXPECT_THROW((void)belief_to_system(std::vector<double>{}), Error);
}

TEST(BeliefProperty, CorrelationMatchesPearsonOracle) {
  cpref::testing::Rng rng(123);
  for (int round = 0; round < 300; ++round) {
    auto u = cpref::testing::letters(6);
    auto db = cpref::testing::random_db(rng, u, 10, 2 + cpref::testing::draw(rng, 60), 0.5);
    auto rules = cpref::testing::random_rules(rng, 2, 6);
    const auto odb = oracle::to_oracle(*db);
    const auto a = oracle::to_oracle(rules[0], *u);
    const auto b = oracle::to_oracle(rules[1], *u);
    const double want = std::abs(oracle::pearson(oracle::indicator(a, odb), oracle::indicator(b, odb)));
    const double got = correlation_belief(rules[0], rules[1], *db);
    EXPECT_NEAR(got, want, 1e-12);
    EXPECT_NEAR(got, correlation_belief(rules[1], rules[0], *db), 1e-15);
    EXPECT_GE(got, 0.0);
    EXPECT_LE(got, 1.0);
    Measures m(*db);
    const auto n = m.size();
    const auto ca = m.agree_count(rules[0]);
    const auto cb = m.agree_count(rules[1]);
    const auto cab = m.joint_count(rules[0], rules[1]);
    EXPECT_NEAR(correlation_from_counts(n, ca, cb, cab, Estimator::Population),
                correlation_from_counts(n, ca, cb, cab, Estimator::Unbiased), 1e-12);
  }
}

TEST(BeliefProperty, UnitCosineMatchesVectorCosine) {
  cpref::testing::Rng rng(321);
  auto u = cpref::testing::letters(8);
  std::vector<std::string> names(u->names().begin(), u->names().end());
  const auto unit = CosineWeights::uniform(1.0);
  for (int round = 0; round < 500; ++round) {
    auto rules = cpref::testing::random_rules(rng, 2, 8, 2, 3);
    const double want = oracle::vector_cosine(oracle::to_oracle(rules[0], *u), oracle::to_oracle(rules[1], *u), names);
    EXPECT_NEAR(cosine_belief(rules[0], rules[1], unit), want, 1e-12);
    EXPECT_NEAR(cosine_belief(rules[0], rules[1]), cosine_belief(rules[1], rules[0]), 1e-15);
  }
}

TEST(BeliefProperty, SystemReductionsAgainstLoopOracle) {
  cpref::testing::Rng rng(55);
  auto u = cpref::testing::letters(7);
  for (int round = 0; round < 50; ++round) {
    auto db = cpref::testing::random_db(rng, u, 15, 60, 0.5);
    auto all = cpref::testing::random_rules(rng, 11, 7);
    std::vector<Rule> sys(all.begin() + 1, all.begin() + 1 + static_cast<std::ptrdiff_t>(1 + cpref::testing::draw(rng, 10)));
    BeliefSystem system(RuleSet::in_order(sys), db);
    const CosineBelief cos;
    const CorrelationBelief cov;
    for (const BeliefFunction* fn : {static_cast<const BeliefFunction*>(&cos), static_cast<const BeliefFunction*>(&cov)}) {
      double sum = 0, mx = -1;
      for (const auto& r : system.rules()) {
        const double v = fn->belief(all[0], r, *db);
        sum += v;
        mx = std::max(mx, v);
      }
      const double n = static_cast<double>(system.size());
      const double b = belief_to_system(all[0], system, *fn);
      const double d = deviation_to_system(all[0], system, *fn);
      EXPECT_NEAR(b, mx, 1e-12);
      EXPECT_NEAR(d, sum / n - 1.0, 1e-12);
      EXPECT_GE(b + 1e-12, d + 1.0);
    }
  }
}

TEST(BeliefProperty, AddingSystemRuleNeverLowersBelief) {
  cpref::testing::Rng rng(66);
  auto u = cpref::testing::letters(7);
  auto db = cpref::testing::random_db(rng, u, 15, 60, 0.5);
  auto rules = cpref::testing::random_rules(rng, 8, 7);
  CorrelationBelief cov;
  double prev = 0;
  for (std::size_t k = 2; k <= rules.size(); ++k) {
    BeliefSystem system(RuleSet::in_order({rules.begin() + 1, rules.begin() + static_cast<std::ptrdiff_t>(k)}), db);
    const double b = belief_to_system(rules[0], system, cov);
    EXPECT_GE(b, prev);
    prev = b;
  }
}

TEST(BeliefProperty, ScoringIsPointwise) {
  cpref::testing::Rng rng(77);
  auto u = cpref::testing::letters(7);
  auto db = cpref::testing::random_db(rng, u, 15, 80, 0.5);
  auto rules = cpref::testing::random_rules(rng, 12, 7);
  BeliefSystem system(RuleSet::in_order({rules.begin(), rules.begin() + 4}), db);
  std::vector<Rule> scored_rules(rules.begin() + 4, rules.end());
  auto reversed = scored_rules;
  std::reverse(reversed.begin(), reversed.end());
  CosineBelief cos;
  ScoreOptions opts;
  opts.jobs = 3;
  auto a = score_ruleset(RuleSet::in_order(scored_rules), system, cos, *db, opts);
  auto b = score_ruleset(RuleSet::in_order(reversed), system, cos, *db);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[a.size() - 1 - i];
    EXPECT_EQ(x.rule, y.rule);
    EXPECT_EQ(x.belief, y.belief);
    EXPECT_EQ(x.deviation, y.deviation);
    EXPECT_EQ(x.eta, y.eta);
  }
}

TEST(BeliefProperty, ForeignDatabaseScoringMatchesPairwise) {
  cpref::testing::Rng rng(88);
  auto u = cpref::testing::letters(7);
  auto consensus = cpref::testing::random_db(rng, u, 15, 80, 0.5);
  auto user = cpref::testing::random_db(rng, u, 12, 40, 0.5);
  auto rules = cpref::testing::random_rules(rng, 9, 7);
  BeliefSystem system(RuleSet::in_order({rules.begin(), rules.begin() + 4}), consensus);
  CorrelationBelief cov;
  auto scored = score_ruleset(RuleSet::in_order({rules.begin() + 4, rules.end()}), system, cov, *user);
  for (const auto& s : scored) {
    double mx = 0;
    for (const auto& r : system.rules()) mx = std::max(mx, cov.belief(s.rule, r, *user));
    EXPECT_NEAR(s.belief, mx, 1e-12);
  }
}

TEST(RankTopK, AbsoluteEtaOrdering) {
  auto u = cpref::testing::five_attr_universe();
  ScoredRule a{R({"A"}, {"B"}, {}, *u), 0.1, std::nullopt, 0.9, -0.2, 0.9, Branch::Generalized};
  ScoredRule b{R({"C"}, {"D"}, {}, *u), 0.1, std::nullopt, 0.1, -0.95, -0.95, Branch::Personalized};
  std::vector<ScoredRule> list{a, b};
  auto top = rank_topk(list, 1, RankKey::Eta, *u);
  ASSERT_EQ(top.size(), 1u);
  EXPECT_EQ(top[0].rule, b.rule);
  EXPECT_EQ(rank_topk(list, 5, RankKey::Belief, *u)[0].rule, a.rule);
  EXPECT_EQ(rank_topk(list, 5, RankKey::AbsDeviation, *u)[0].rule, b.rule);
  EXPECT_EQ(rank_topk(list, 5, RankKey::Eta, *u).size(), 2u);
}

TEST(RankTopK, TiesBySupportThenText) {
  auto u = cpref::testing::five_attr_universe();
  ScoredRule a{R({"C"}, {"D"}, {}, *u), 0.1, std::nullopt, 0.5, -0.5, 0.5, Branch::Generalized};
  ScoredRule b{R({"A"}, {"B"}, {}, *u), 0.1, std::nullopt, 0.5, -0.5, 0.5, Branch::Generalized};
  ScoredRule c{R({"E"}, {"D"}, {}, *u), 0.3, std::nullopt, 0.5, -0.5, 0.5, Branch::Generalized};
  std::vector<ScoredRule> list{a, b, c};
  auto top = rank_topk(list, 3, RankKey::Eta, *u);
  EXPECT_EQ(top[0].rule, c.rule);
  EXPECT_EQ(top[1].rule, b.rule);
  EXPECT_EQ(top[2].rule, a.rule);
}

TEST(BeliefRegistry, BuiltinsAndErrors) {
  auto& reg = BeliefRegistry::instance();
  EXPECT_TRUE(reg.contains("cos"));
  EXPECT_TRUE(reg.contains("cov"));
  auto cos = reg.make({"cos", {{"k1", 1.0}, {"k2", 1.0}, {"k3", 1.0}}});
  EXPECT_EQ(cos->name(), "cos");
  try {
    (void)reg.make({"lift", {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownBeliefFunction);
  }
  EXPECT_THROW((void)reg.make({"cos", {{"k9", 1.0}}}), Error);
  EXPECT_THROW((void)reg.make({"cos", {{"k1", -1.0}}}), Error);
  EXPECT_THROW((void)reg.make({"cov", {{"unbiased", 0.5}}}), Error);
}

TEST(BeliefRegistry, CustomFunctionPlugsIn) {
  BeliefRegistry reg;
  struct Constant final : BeliefFunction {
    std::string_view name() const noexcept override { return "half"; }
    double belief(const Rule&, const Rule&, const PreferenceDatabase&) const override { return 0.5; }
  };
  reg.add("half", [](const std::map<std::string, double>&) { return std::make_unique<Constant>(); });
  auto fn = reg.make({"half", {}});
  auto db = cpref::testing::sample_db();
  BeliefSystem system(RuleSet::in_order({R({"D"}, {"C"}, {}, db->universe())}), db);
  auto scored = score_ruleset(RuleSet::in_order({R({"D"}, {"E"}, {"B"}, db->universe())}), system, *fn, *db);
  EXPECT_EQ(scored[0].belief, 0.5);
  EXPECT_EQ(scored[0].deviation, -0.5);
  EXPECT_EQ(scored[0].branch, Branch::Generalized);
}

TEST(BeliefSystem, EmptyRulesetRejected) {
  try {
    BeliefSystem system(RuleSet{}, cpref::testing::sample_db());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptySystem);
  }
}
