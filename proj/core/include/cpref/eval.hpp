#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cpref/belief.hpp"
#include "cpref/model.hpp"

namespace cpref {

enum class Verdict { Agree, Reverse, Both, None };

// Agree: some rule agrees with <t,u> and none with <u,t>. Reverse: the opposite.
// Both: each direction is matched by some rule.
Verdict ruleset_predicts(const RuleSet& rules, const PreferencePair& pair, const PreferenceDatabase& db);

// Verdict per pair of db, in pair order.
std::vector<Verdict> verdicts(const RuleSet& rules, const PreferenceDatabase& db);
std::vector<Verdict> verdicts(std::span<const Rule> rules, const PreferenceDatabase& db);

struct EvalReport {
  double recall = 0.0;
  std::optional<double> precision;
  std::optional<double> f1;
  std::optional<double> favoritism;
  // Agree + Both
  std::size_t covered_agree = 0;
  // Agree + Reverse + Both
  std::size_t covered_any = 0;
  std::size_t pairs = 0;
};

// Throws EmptyDatabase.
EvalReport evaluate(std::span<const Rule> rules, const PreferenceDatabase& db);

double recall(const RuleSet& rules, const PreferenceDatabase& db);
std::optional<double> precision(const RuleSet& rules, const PreferenceDatabase& db);
// P*R / (P+R). Undefined when precision is undefined or P+R = 0.
std::optional<double> f1(std::optional<double> precision, double recall);
// 2*P*R / (P+R), reported separately and labelled as such.
std::optional<double> standard_f1(std::optional<double> precision, double recall);
// Mean |t.rating - u.rating| over pairs with verdict Agree or Both.
std::optional<double> favoritism(const RuleSet& rules, const PreferenceDatabase& db);

enum class TopKKey { Eta, Belief, AbsDeviation, Raw };
std::string_view to_string(TopKKey key) noexcept;

struct TopKOptions {
  std::vector<std::size_t> ks{5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
  std::vector<TopKKey> keys{TopKKey::Eta, TopKKey::Belief, TopKKey::AbsDeviation, TopKKey::Raw};
  bool standard_f1 = false;
  unsigned jobs = 1;
};

struct TopKRow {
  TopKKey key;
  std::size_t k;
  std::string metric;
  // Undefined when no user has the metric defined.
  std::optional<double> value;
};

struct UserSplit {
  std::shared_ptr<const PreferenceDatabase> train;
  std::shared_ptr<const PreferenceDatabase> test;
};

// For every key and K, the first K rules of each user's list (sorted by the
// key, or as given for Raw) are evaluated: recall and precision on the user's
// test split, favoritism on the train split. Metrics are macro-averaged over
// the users where they are defined; per-user F1 is averaged the same way.
// Rows come out ordered by key, then K, then metric. Throws MissingSplit when a
// scored user has no split entry.
std::vector<TopKRow> topk_experiment(const std::map<std::string, std::vector<ScoredRule>>& scored_per_user,
                                     const std::map<std::string, UserSplit>& splits, const AttributeUniverse& universe,
                                     const TopKOptions& options = {});

}  // namespace cpref
