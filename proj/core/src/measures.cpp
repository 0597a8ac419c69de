#include "cpref/measures.hpp"

#include <mutex>

namespace cpref {

PairIndex::PairIndex(const PreferenceDatabase& db) : pairs_(db.size()) {
  const std::size_t m = db.universe().size();
  in_preferred_.assign(m, BitVector(pairs_));
  in_dominated_.assign(m, BitVector(pairs_));
  const auto pairs = db.pairs();
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    db.transaction(pairs[p].preferred).items.bits().for_each_set([&](std::size_t a) { in_preferred_[a].set(p); });
    db.transaction(pairs[p].dominated).items.bits().for_each_set([&](std::size_t a) { in_dominated_[a].set(p); });
  }
}

BitVector PairIndex::agreement(const Rule& rule) const {
  // Columns the pair must carry (require_*) or must not carry (forbid_*).
  std::vector<const BitVector::Word*> require_t;
  std::vector<const BitVector::Word*> require_u;
  std::vector<const BitVector::Word*> forbid_t;
  std::vector<const BitVector::Word*> forbid_u;
  auto collect = [&](const Itemset& items, std::vector<const BitVector::Word*>& out,
                     const std::vector<BitVector>& columns) {
    items.bits().for_each_set([&](std::size_t a) { out.push_back(columns[a].words().data()); });
  };
  collect(rule.plus(), require_t, in_preferred_);
  collect(rule.context(), require_t, in_preferred_);
  collect(rule.minus(), require_u, in_dominated_);
  collect(rule.context(), require_u, in_dominated_);
  collect(rule.minus(), forbid_t, in_preferred_);
  collect(rule.plus(), forbid_u, in_dominated_);

  BitVector out(pairs_, true);
  auto words = out.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    BitVector::Word acc = words[w];
    for (const auto* col : require_t) acc &= col[w];
    for (const auto* col : require_u) acc &= col[w];
    for (const auto* col : forbid_t) acc &= ~col[w];
    for (const auto* col : forbid_u) acc &= ~col[w];
    words[w] = acc;
  }
  return out;
}

// ---------------------------------------------------------------------------

Measures::Measures(const PreferenceDatabase& db) : db_(&db), index_(db) {}

const BitVector& Measures::agreement(const Rule& rule) const {
  {
    std::shared_lock lock(cache_mutex_);
    if (auto it = cache_.find(rule); it != cache_.end()) return *it->second;
  }
  auto bits = std::make_unique<const BitVector>(index_.agreement(rule));
  std::unique_lock lock(cache_mutex_);
  // A concurrent writer may have won; its entry is identical.
  auto [it, inserted] = cache_.try_emplace(rule, std::move(bits));
  return *it->second;
}

std::size_t Measures::cached_rules() const {
  std::shared_lock lock(cache_mutex_);
  return cache_.size();
}

std::size_t Measures::agree_count(const Rule& rule) const { return agreement(rule).count(); }

std::size_t Measures::against_count(const Rule& rule) const { return agreement(rule.inverse()).count(); }

std::size_t Measures::joint_count(const Rule& a, const Rule& b) const {
  return and_count(agreement(a), agreement(b));
}

MeasureRecord Measures::record(const Rule& rule) const {
  MeasureRecord rec;
  rec.agree = agree_count(rule);
  rec.against = against_count(rule);
  rec.support = size() == 0 ? 0.0 : static_cast<double>(rec.agree) / static_cast<double>(size());
  if (rec.agree + rec.against > 0) {
    rec.confidence = static_cast<double>(rec.agree) / static_cast<double>(rec.agree + rec.against);
  }
  return rec;
}

void Measures::require_nonempty() const {
  if (size() == 0) throw Error(ErrorKind::EmptyDatabase, "preference database has no pairs");
}

double Measures::support(const Rule& rule) const {
  require_nonempty();
  return static_cast<double>(agree_count(rule)) / static_cast<double>(size());
}

std::optional<double> Measures::confidence(const Rule& rule) const { return record(rule).confidence; }

double Measures::joint_prob(const Rule& a, const Rule& b) const {
  require_nonempty();
  return static_cast<double>(joint_count(a, b)) / static_cast<double>(size());
}

double Measures::distance(const Rule& from, const Rule& to) const {
  require_nonempty();
  const auto diff = agree_count(from) - joint_count(from, to);
  return static_cast<double>(diff) / static_cast<double>(size());
}

Ratio avg_internal_distance_ratio(std::span<const Rule> rules, const Measures& measures) {
  const std::size_t n = rules.size();
  if (n < 2) throw Error(ErrorKind::TooFewRules, "average internal distance needs at least two rules");
  if (measures.size() == 0) throw Error(ErrorKind::EmptyDatabase, "preference database has no pairs");
  std::vector<std::uint64_t> agree(n);
  for (std::size_t i = 0; i < n; ++i) agree[i] = measures.agree_count(rules[i]);
  // sum over i != j of (agree_i - joint_ij) = (n-1) * sum_i agree_i - 2 * sum_{i<j} joint_ij
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) total += (n - 1) * agree[i];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) total -= 2 * measures.joint_count(rules[i], rules[j]);
  }
  return Ratio{total, static_cast<std::uint64_t>(measures.size()) * n * (n - 1)};
}

double avg_internal_distance(const RuleSet& rules, const Measures& measures) {
  return avg_internal_distance_ratio(rules.rules(), measures).value();
}

// ---------------------------------------------------------------------------

std::size_t agree_count(const Rule& rule, const PreferenceDatabase& db) {
  std::size_t n = 0;
  for (const auto& p : db.pairs()) n += rule_agrees(rule, p, db) ? 1 : 0;
  return n;
}

std::size_t against_count(const Rule& rule, const PreferenceDatabase& db) { return agree_count(rule.inverse(), db); }

double support(const Rule& rule, const PreferenceDatabase& db) {
  if (db.empty()) throw Error(ErrorKind::EmptyDatabase, "preference database has no pairs");
  return static_cast<double>(agree_count(rule, db)) / static_cast<double>(db.size());
}

std::optional<double> confidence(const Rule& rule, const PreferenceDatabase& db) {
  const auto agree = agree_count(rule, db);
  const auto against = against_count(rule, db);
  if (agree + against == 0) return std::nullopt;
  return static_cast<double>(agree) / static_cast<double>(agree + against);
}

double joint_prob(const Rule& a, const Rule& b, const PreferenceDatabase& db) {
  return Measures(db).joint_prob(a, b);
}

double distance(const Rule& from, const Rule& to, const PreferenceDatabase& db) {
  return Measures(db).distance(from, to);
}

double avg_internal_distance(const RuleSet& rules, const PreferenceDatabase& db) {
  return avg_internal_distance(rules, Measures(db));
}

}  // namespace cpref
