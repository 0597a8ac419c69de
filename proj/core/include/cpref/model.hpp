#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cpref/bitvector.hpp"
#include "cpref/errors.hpp"

namespace cpref {

// Ordered attribute names. Position k of every itemset refers to names()[k].
// Names are unique and kept in lexicographic order so encodings are reproducible.
class AttributeUniverse {
 public:
  AttributeUniverse() = default;
  // Sorts and de-duplicates the given names.
  explicit AttributeUniverse(std::vector<std::string> names);

  std::size_t size() const noexcept { return names_.size(); }
  std::span<const std::string> names() const noexcept { return names_; }
  const std::string& name(std::size_t pos) const { return names_.at(pos); }
  std::optional<std::size_t> find(std::string_view name) const;
  // Throws UnknownAttribute.
  std::size_t index_of(std::string_view name) const;

  friend bool operator==(const AttributeUniverse& a, const AttributeUniverse& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

// A set of attributes encoded as an m-bit vector over an AttributeUniverse.
class Itemset {
 public:
  Itemset() = default;
  explicit Itemset(std::size_t width) : bits_(width) {}
  explicit Itemset(BitVector bits) : bits_(std::move(bits)) {}

  std::size_t width() const noexcept { return bits_.width(); }
  std::size_t size() const noexcept { return bits_.count(); }
  bool empty() const noexcept { return bits_.none(); }
  bool contains(std::size_t pos) const noexcept { return bits_.test(pos); }
  void insert(std::size_t pos) noexcept { bits_.set(pos); }

  bool is_subset_of(const Itemset& other) const noexcept { return bits_.is_subset_of(other.bits_); }
  bool intersects(const Itemset& other) const noexcept { return bits_.intersects(other.bits_); }

  friend Itemset operator&(const Itemset& a, const Itemset& b) { return Itemset(a.bits_ & b.bits_); }
  friend Itemset operator|(const Itemset& a, const Itemset& b) { return Itemset(a.bits_ | b.bits_); }
  friend Itemset operator-(const Itemset& a, const Itemset& b) {
    BitVector out = a.bits_;
    out.subtract(b.bits_);
    return Itemset(std::move(out));
  }

  const BitVector& bits() const noexcept { return bits_; }
  std::vector<std::size_t> positions() const { return bits_.positions(); }
  std::string to_string() const { return bits_.to_string(); }

  friend bool operator==(const Itemset&, const Itemset&) = default;
  friend std::strong_ordering operator<=>(const Itemset& a, const Itemset& b) noexcept { return a.bits_ <=> b.bits_; }

 private:
  BitVector bits_;
};

// Throws UnknownAttribute for a name missing from the universe.
Itemset encode_itemset(std::span<const std::string> names, const AttributeUniverse& universe);
Itemset encode_itemset(std::initializer_list<std::string_view> names, const AttributeUniverse& universe);
std::vector<std::string> decode_itemset(const Itemset& items, const AttributeUniverse& universe);

using TxIndex = std::uint32_t;

struct Transaction {
  std::string id;
  std::string user;
  Itemset items;
  double rating = 0.0;
};

// <preferred, dominated>: the owner prefers transaction `preferred` over `dominated`.
// Both fields index the owning database's transaction table.
struct PreferencePair {
  TxIndex preferred = 0;
  TxIndex dominated = 0;

  friend bool operator==(const PreferencePair&, const PreferencePair&) = default;
};

class PreferenceDatabase {
 public:
  PreferenceDatabase() = default;
  // Validates that every pair resolves and that no pair relates a transaction to itself.
  PreferenceDatabase(std::shared_ptr<const AttributeUniverse> universe, std::vector<Transaction> transactions,
                     std::vector<PreferencePair> pairs);

  const AttributeUniverse& universe() const noexcept { return *universe_; }
  const std::shared_ptr<const AttributeUniverse>& shared_universe() const noexcept { return universe_; }

  std::span<const Transaction> transactions() const noexcept { return transactions_; }
  std::span<const PreferencePair> pairs() const noexcept { return pairs_; }
  // |xi|
  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }

  // Throws DanglingPair.
  const Transaction& transaction(TxIndex index) const;
  std::optional<TxIndex> find(std::string_view id) const;

  // Same transactions and universe, different pair list.
  PreferenceDatabase with_pairs(std::vector<PreferencePair> pairs) const;

 private:
  std::shared_ptr<const AttributeUniverse> universe_;
  std::vector<Transaction> transactions_;
  std::vector<PreferencePair> pairs_;
  std::unordered_map<std::string, TxIndex> by_id_;
};

// Contextual preference rule plus > minus | context. The three itemsets are
// pairwise disjoint and plus/minus are non-empty; violations throw InvalidRule.
class Rule {
 public:
  Rule(Itemset plus, Itemset minus, Itemset context);

  static Rule from_names(std::initializer_list<std::string_view> plus, std::initializer_list<std::string_view> minus,
                         std::initializer_list<std::string_view> context, const AttributeUniverse& universe);

  const Itemset& plus() const noexcept { return plus_; }
  const Itemset& minus() const noexcept { return minus_; }
  const Itemset& context() const noexcept { return context_; }
  std::size_t width() const noexcept { return plus_.width(); }

  // minus > plus | context
  Rule inverse() const;

  friend bool operator==(const Rule&, const Rule&) = default;
  friend std::strong_ordering operator<=>(const Rule&, const Rule&) = default;

  std::size_t hash() const noexcept;

 private:
  Itemset plus_;
  Itemset minus_;
  Itemset context_;
};

struct RuleHash {
  std::size_t operator()(const Rule& r) const noexcept { return r.hash(); }
};

// Agreement: context+plus within t, context+minus within u, minus absent
// from t and plus absent from u, where t = preferred and u = dominated.
bool rule_agrees(const Rule& rule, const PreferencePair& pair, const PreferenceDatabase& db);
bool rule_agrees(const Rule& rule, const Itemset& preferred, const Itemset& dominated) noexcept;

inline Rule inverse(const Rule& rule) { return rule.inverse(); }

// Canonical text: "i+ > i- | X", items comma-joined in universe order, "NULL" for an empty context.
std::string to_text(const Rule& rule, const AttributeUniverse& universe);
std::string slot_text(const Itemset& items, const AttributeUniverse& universe);
// Inverse of slot_text; "NULL" and "" decode to the empty itemset.
Itemset parse_slot(std::string_view text, const AttributeUniverse& universe);
Rule parse_rule(std::string_view text, const AttributeUniverse& universe);

// De-duplicated rule list in a fixed order.
class RuleSet {
 public:
  RuleSet() = default;

  // Sorts by descending support, then by canonical rule text; drops duplicates.
  static RuleSet canonical(std::vector<Rule> rules, std::span<const double> supports,
                           const AttributeUniverse& universe);
  // Keeps the given order; later duplicates are dropped.
  static RuleSet in_order(std::vector<Rule> rules);

  std::size_t size() const noexcept { return rules_.size(); }
  bool empty() const noexcept { return rules_.empty(); }
  const Rule& operator[](std::size_t i) const { return rules_[i]; }
  std::span<const Rule> rules() const noexcept { return rules_; }
  auto begin() const noexcept { return rules_.begin(); }
  auto end() const noexcept { return rules_.end(); }
  bool contains(const Rule& rule) const;

  friend bool operator==(const RuleSet&, const RuleSet&) = default;

 private:
  std::vector<Rule> rules_;
};

}  // namespace cpref
