#include <gtest/gtest.h>

#include <algorithm>
#include <thread>

#include <cpref/measures.hpp>

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracle.hpp"

using namespace cpref;
using cpref::testing::R;

namespace {

struct MeasuresSample : ::testing::Test {
  std::shared_ptr<const PreferenceDatabase> db = cpref::testing::sample_db();
  const AttributeUniverse& u = db->universe();
  Rule de_b = R({"D"}, {"E"}, {"B"}, u);
  Rule db_c = R({"D"}, {"B"}, {"C"}, u);
  Rule ac_b = R({"A"}, {"C"}, {"B"}, u);
  Rule dc = R({"D"}, {"C"}, {}, u);
};

}  // namespace

TEST_F(MeasuresSample, AgreeAndAgainstCounts) {
  EXPECT_EQ(agree_count(de_b, *db), 2u);
  EXPECT_EQ(agree_count(db_c, *db), 0u);
  EXPECT_EQ(agree_count(ac_b, *db), 2u);
  EXPECT_EQ(against_count(de_b, *db), 0u);
  EXPECT_EQ(against_count(R({"E"}, {"D"}, {}, u), *db), 2u);
  EXPECT_EQ(agree_count(dc, *db), 4u);
}

TEST_F(MeasuresSample, SupportAndConfidence) {
  Measures m(*db);
  EXPECT_EQ(m.support(de_b), 0.4);
  EXPECT_EQ(m.confidence(de_b), 1.0);
  EXPECT_EQ(m.support(ac_b), 0.4);
  EXPECT_EQ(m.confidence(ac_b), 1.0);
  EXPECT_EQ(support(de_b, *db), 0.4);
  EXPECT_FALSE(confidence(db_c, *db).has_value());
  EXPECT_EQ(m.support(R({"A"}, {"E"}, {"C"}, u)), 0.0);
}

TEST_F(MeasuresSample, JointProbabilityAndDistance) {
  Measures m(*db);
  EXPECT_EQ(m.joint_prob(de_b, db_c), 0.0);
  EXPECT_EQ(m.joint_prob(de_b, de_b), m.support(de_b));
  EXPECT_EQ(m.joint_count(de_b, dc), 1u);
  EXPECT_EQ(m.distance(de_b, db_c), 0.4);
  EXPECT_EQ(m.distance(de_b, de_b), 0.0);
  EXPECT_NEAR(m.distance(dc, de_b), 0.6, 1e-15);
}

TEST_F(MeasuresSample, AverageInternalDistance) {
  Measures m(*db);
  std::vector<Rule> two{de_b, dc};
  EXPECT_EQ(avg_internal_distance_ratio(two, m), (Ratio{4, 10}));
  std::vector<Rule> three{de_b, dc, ac_b};
  auto r = avg_internal_distance_ratio(three, m);
  EXPECT_EQ(r, (Ratio{8, 30}));
  EXPECT_NEAR(r.value(), 1.6 / 6, 1e-15);
}

TEST_F(MeasuresSample, ErrorKinds) {
  Measures m(*db);
  std::vector<Rule> one{de_b};
  try {
    (void)avg_internal_distance_ratio(one, m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooFewRules);
  }
  PreferenceDatabase empty = db->with_pairs({});
  Measures me(empty);
  try {
    (void)me.support(de_b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyDatabase);
  }
  EXPECT_EQ(me.record(de_b).support, 0.0);
}

TEST(MeasuresProperty, DisjointAgreementSetsAverageToMeanSupport) {
  auto db = cpref::testing::sample_db();
  const auto& u = db->universe();
  // p1,p3 versus p4
  Rule a = R({"D"}, {"E"}, {"B"}, u);
  Rule b = R({"D"}, {"C"}, {"E"}, u);
  Measures m(*db);
  ASSERT_EQ(m.joint_count(a, b), 0u);
  std::vector<Rule> s{a, b};
  EXPECT_DOUBLE_EQ(avg_internal_distance_ratio(s, m).value(), (m.support(a) + m.support(b)) / 2);
}

TEST(MeasuresProperty, MatchesOracleOnRandomInstances) {
  cpref::testing::Rng rng(2024);
  for (int round = 0; round < 200; ++round) {
    auto u = cpref::testing::letters(3 + cpref::testing::draw(rng, 6));
    auto db = cpref::testing::random_db(rng, u, 4 + cpref::testing::draw(rng, 12), 1 + cpref::testing::draw(rng, 50));
    auto rules = cpref::testing::random_rules(rng, 2 + cpref::testing::draw(rng, 5), u->size(), 1,
                                              std::min<std::size_t>(2, u->size() - 2));
    if (rules.size() < 2) continue;
    Measures m(*db);
    auto odb = oracle::to_oracle(*db);
    auto orules = oracle::to_oracle(rules, *u);
    for (std::size_t i = 0; i < rules.size(); ++i) {
      const auto rec = m.record(rules[i]);
      EXPECT_EQ(static_cast<std::int64_t>(rec.agree), oracle::agree_count(orules[i], odb));
      EXPECT_EQ(static_cast<std::int64_t>(rec.against), oracle::agree_count(oracle::inverse(orules[i]), odb));
      for (std::size_t j = 0; j < rules.size(); ++j) {
        EXPECT_EQ(static_cast<std::int64_t>(m.joint_count(rules[i], rules[j])),
                  oracle::joint_count(orules[i], orules[j], odb));
        EXPECT_LE(m.joint_count(rules[i], rules[j]), std::min(m.agree_count(rules[i]), m.agree_count(rules[j])));
      }
    }
    const auto got = avg_internal_distance_ratio(rules, m);
    const auto want = oracle::avg_internal_distance(orules, odb);
    EXPECT_EQ(static_cast<std::int64_t>(got.num) * want.den, want.num * static_cast<std::int64_t>(got.den));
  }
}

TEST(MeasuresProperty, InvariantUnderPairPermutation) {
  cpref::testing::Rng rng(5);
  auto u = cpref::testing::letters(6);
  auto db = cpref::testing::random_db(rng, u, 10, 40);
  std::vector<PreferencePair> shuffled(db->pairs().begin(), db->pairs().end());
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  auto db2 = db->with_pairs(shuffled);
  auto rules = cpref::testing::random_rules(rng, 6, 6);
  Measures a(*db), b(db2);
  for (const auto& r : rules) EXPECT_EQ(a.agree_count(r), b.agree_count(r));
  EXPECT_EQ(avg_internal_distance_ratio(rules, a), avg_internal_distance_ratio(rules, b));
}

TEST(MeasuresCache, ConcurrentReadersShareEntries) {
  cpref::testing::Rng rng(3);
  auto u = cpref::testing::letters(8);
  auto db = cpref::testing::random_db(rng, u, 30, 500);
  auto rules = cpref::testing::random_rules(rng, 40, 8);
  Measures m(*db);
  std::vector<std::vector<std::size_t>> counts(4, std::vector<std::size_t>(rules.size()));
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (std::size_t i = 0; i < rules.size(); ++i) counts[t][i] = m.agree_count(rules[i]);
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& per_thread : counts) {
    for (std::size_t i = 0; i < rules.size(); ++i) EXPECT_EQ(per_thread[i], agree_count(rules[i], *db));
  }
  EXPECT_EQ(m.cached_rules(), rules.size());
}
