#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "cpref/measures.hpp"
#include "cpref/model.hpp"

namespace cpref {

struct PraConfig {
  // nullopt = Auto: 1.5 x mean support of the input ruleset.
  std::optional<double> mindis;
  unsigned jobs = 1;

  static constexpr double kAutoFactor = 1.5;
};

struct PraStep {
  Rule rule;
  Ratio avgdis;
};

struct PraTrace {
  double mindis = 0.0;
  // Empty when no pair of rules clears the threshold.
  std::optional<std::pair<Rule, Rule>> seed_pair;
  Ratio seed_avgdis;
  std::vector<PraStep> additions;
  Ratio final_avgdis;
};

struct PraResult {
  RuleSet rules;
  PraTrace trace;
};

// Throws EmptyRuleset.
double resolve_mindis(const RuleSet& rules, const Measures& measures, const PraConfig& cfg);

// Greedy aggregation: seed with the most distant pair whose average internal
// distance exceeds mindis, then repeatedly add the rule that keeps the set's
// average internal distance highest, as long as it stays above mindis. Scans
// run in canonical order and only strict improvements replace the incumbent,
// so ties go to the canonically earlier rule. Throws TooFewRules.
PraResult pra_aggregate(const RuleSet& rules, const Measures& measures, const PraConfig& cfg);

}  // namespace cpref
