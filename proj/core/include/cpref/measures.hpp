#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "cpref/bitvector.hpp"
#include "cpref/model.hpp"

namespace cpref {

__extension__ using u128 = unsigned __int128;

// Exact non-negative rational. Comparisons are exact (128-bit cross products).
struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }

  friend bool operator==(const Ratio& a, const Ratio& b) noexcept {
    return static_cast<u128>(a.num) * b.den == static_cast<u128>(b.num) * a.den;
  }
  friend bool operator<(const Ratio& a, const Ratio& b) noexcept {
    return static_cast<u128>(a.num) * b.den < static_cast<u128>(b.num) * a.den;
  }
  friend bool operator>(const Ratio& a, const Ratio& b) noexcept { return b < a; }
};

struct MeasureRecord {
  std::size_t agree = 0;
  std::size_t against = 0;
  double support = 0.0;
  // Undefined when the rule and its inverse never match.
  std::optional<double> confidence;
};

// Column bitmaps over the pairs of one database: for every attribute, which
// pairs carry it on the preferred side and which on the dominated side. A
// rule's agreement set is then a handful of word-parallel AND/ANDNOT passes.
class PairIndex {
 public:
  explicit PairIndex(const PreferenceDatabase& db);

  std::size_t size() const noexcept { return pairs_; }
  std::size_t attribute_count() const noexcept { return in_preferred_.size(); }

  // Bit p is set iff rule_agrees(rule, db.pairs()[p]).
  BitVector agreement(const Rule& rule) const;

 private:
  std::size_t pairs_ = 0;
  std::vector<BitVector> in_preferred_;
  std::vector<BitVector> in_dominated_;
};

// Support, confidence, joint probability and rule distance over one database.
// Agreement bitmaps are memoised per rule; the memo table is safe to use from
// several threads. The database must outlive this object.
class Measures {
 public:
  explicit Measures(const PreferenceDatabase& db);

  const PreferenceDatabase& database() const noexcept { return *db_; }
  const PairIndex& index() const noexcept { return index_; }
  // |xi|
  std::size_t size() const noexcept { return index_.size(); }

  const BitVector& agreement(const Rule& rule) const;
  // Computed on the fly, never cached.
  BitVector agreement_uncached(const Rule& rule) const { return index_.agreement(rule); }

  std::size_t agree_count(const Rule& rule) const;
  std::size_t against_count(const Rule& rule) const;
  std::size_t joint_count(const Rule& a, const Rule& b) const;

  MeasureRecord record(const Rule& rule) const;

  // The probability-valued measures throw EmptyDatabase when |xi| = 0.
  double support(const Rule& rule) const;
  std::optional<double> confidence(const Rule& rule) const;
  double joint_prob(const Rule& a, const Rule& b) const;
  // dis(a -> b) = P(a) - P(ab)
  double distance(const Rule& from, const Rule& to) const;

  std::size_t cached_rules() const;

 private:
  void require_nonempty() const;

  const PreferenceDatabase* db_;
  PairIndex index_;
  mutable std::shared_mutex cache_mutex_;
  mutable std::unordered_map<Rule, std::unique_ptr<const BitVector>, RuleHash> cache_;
};

// Mean directed distance over all ordered pairs i != j of `rules`, as an exact
// ratio. Throws TooFewRules for fewer than two rules and EmptyDatabase on |xi| = 0.
Ratio avg_internal_distance_ratio(std::span<const Rule> rules, const Measures& measures);
double avg_internal_distance(const RuleSet& rules, const Measures& measures);

// Stand-alone forms over a database. agree_count/against_count scan the pair
// list with rule_agrees directly; the rest build a temporary Measures.
std::size_t agree_count(const Rule& rule, const PreferenceDatabase& db);
std::size_t against_count(const Rule& rule, const PreferenceDatabase& db);
double support(const Rule& rule, const PreferenceDatabase& db);
std::optional<double> confidence(const Rule& rule, const PreferenceDatabase& db);
double joint_prob(const Rule& a, const Rule& b, const PreferenceDatabase& db);
double distance(const Rule& from, const Rule& to, const PreferenceDatabase& db);
double avg_internal_distance(const RuleSet& rules, const PreferenceDatabase& db);

}  // namespace cpref
