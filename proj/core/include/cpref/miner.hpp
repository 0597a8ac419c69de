#pragma once

#include <cstddef>

#include "cpref/model.hpp"

namespace cpref {

struct MinerConfig {
  double min_support = 0.01;
  double min_confidence = 0.7;
  std::size_t max_context_len = 2;
  // Size cap for both the preferred and the dominated itemset.
  std::size_t max_side_len = 1;
  // Worker threads for candidate generation; 0 = hardware concurrency.
  unsigned jobs = 1;

  // Throws InvalidConfig.
  void validate() const;
};

// Every rule that agrees with at least one pair and fits the size caps is a
// candidate; candidates are generated pair by pair (context from t&u, preferred
// side from t-u, dominated side from u-t), so the per-candidate generation
// count is its exact agreement count. Rules meeting both thresholds are
// returned in canonical order. Throws EmptyDatabase on |xi| = 0.
RuleSet enumerate_rules(const PreferenceDatabase& db, const MinerConfig& cfg);

// enumerate_rules over the merged all-user database with the (high) consensus thresholds.
RuleSet mine_consensus(const PreferenceDatabase& merged, const MinerConfig& cfg);

}  // namespace cpref
