#include "cpref/model.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

namespace cpref {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::UnknownAttribute: return "UnknownAttribute";
    case ErrorKind::InvalidRule: return "InvalidRule";
    case ErrorKind::DanglingPair: return "DanglingPair";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::UnknownItem: return "UnknownItem";
    case ErrorKind::UniverseMismatch: return "UniverseMismatch";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::EmptyDatabase: return "EmptyDatabase";
    case ErrorKind::DatabaseTooSmall: return "DatabaseTooSmall";
    case ErrorKind::TooFewRules: return "TooFewRules";
    case ErrorKind::EmptyRuleset: return "EmptyRuleset";
    case ErrorKind::EmptySystem: return "EmptySystem";
    case ErrorKind::ZeroNorm: return "ZeroNorm";
    case ErrorKind::UnknownBeliefFunction: return "UnknownBeliefFunction";
    case ErrorKind::MissingSplit: return "MissingSplit";
    case ErrorKind::MissingArtifact: return "MissingArtifact";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// AttributeUniverse

AttributeUniverse::AttributeUniverse(std::vector<std::string> names) : names_(std::move(names)) {
  std::sort(names_.begin(), names_.end());
  names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
  index_.reserve(names_.size());
  for (std::size_t i = 0; i < names_.size(); ++i) index_.emplace(names_[i], i);
}

std::optional<std::size_t> AttributeUniverse::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t AttributeUniverse::index_of(std::string_view name) const {
  if (auto pos = find(name)) return *pos;
  throw Error(ErrorKind::UnknownAttribute, std::string(name));
}

// ---------------------------------------------------------------------------
// Itemset encoding

Itemset encode_itemset(std::span<const std::string> names, const AttributeUniverse& universe) {
  Itemset out(universe.size());
  for (const auto& name : names) out.insert(universe.index_of(name));
  return out;
}

Itemset encode_itemset(std::initializer_list<std::string_view> names, const AttributeUniverse& universe) {
  Itemset out(universe.size());
  for (auto name : names) out.insert(universe.index_of(name));
  return out;
}

std::vector<std::string> decode_itemset(const Itemset& items, const AttributeUniverse& universe) {
  std::vector<std::string> out;
  items.bits().for_each_set([&](std::size_t pos) { out.push_back(universe.name(pos)); });
  return out;
}

// ---------------------------------------------------------------------------
// PreferenceDatabase

PreferenceDatabase::PreferenceDatabase(std::shared_ptr<const AttributeUniverse> universe,
                                       std::vector<Transaction> transactions, std::vector<PreferencePair> pairs)
    : universe_(std::move(universe)), transactions_(std::move(transactions)), pairs_(std::move(pairs)) {
  if (!universe_) universe_ = std::make_shared<const AttributeUniverse>();
  by_id_.reserve(transactions_.size());
  for (std::size_t i = 0; i < transactions_.size(); ++i) {
    const auto& tx = transactions_[i];
    if (tx.items.width() != universe_->size()) {
      throw Error(ErrorKind::UniverseMismatch, "transaction " + tx.id + " has width " +
                                                   std::to_string(tx.items.width()) + ", universe has " +
                                                   std::to_string(universe_->size()));
    }
    if (!by_id_.emplace(tx.id, static_cast<TxIndex>(i)).second) {
      throw Error(ErrorKind::MalformedRow, "duplicate transaction id " + tx.id);
    }
  }
  const auto n = transactions_.size();
  for (const auto& p : pairs_) {
    if (p.preferred >= n || p.dominated >= n) {
      throw Error(ErrorKind::DanglingPair, "pair <" + std::to_string(p.preferred) + "," +
                                               std::to_string(p.dominated) + "> outside transaction table of size " +
                                               std::to_string(n));
    }
    if (p.preferred == p.dominated) {
      throw Error(ErrorKind::DanglingPair, "pair relates transaction " + transactions_[p.preferred].id + " to itself");
    }
  }
}

const Transaction& PreferenceDatabase::transaction(TxIndex index) const {
  if (index >= transactions_.size()) {
    throw Error(ErrorKind::DanglingPair, "transaction index " + std::to_string(index) + " does not resolve");
  }
  return transactions_[index];
}

std::optional<TxIndex> PreferenceDatabase::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

PreferenceDatabase PreferenceDatabase::with_pairs(std::vector<PreferencePair> pairs) const {
  return PreferenceDatabase(universe_, transactions_, std::move(pairs));
}

// ---------------------------------------------------------------------------
// Rule

Rule::Rule(Itemset plus, Itemset minus, Itemset context)
    : plus_(std::move(plus)), minus_(std::move(minus)), context_(std::move(context)) {
  if (plus_.width() != minus_.width() || plus_.width() != context_.width()) {
    throw Error(ErrorKind::InvalidRule, "rule slots have different widths");
  }
  if (plus_.empty() || minus_.empty()) {
    throw Error(ErrorKind::InvalidRule, "preferred and dominated itemsets must be non-empty");
  }
  if (plus_.intersects(minus_) || plus_.intersects(context_) || minus_.intersects(context_)) {
    throw Error(ErrorKind::InvalidRule, "rule slots must be pairwise disjoint");
  }
}

Rule Rule::from_names(std::initializer_list<std::string_view> plus, std::initializer_list<std::string_view> minus,
                      std::initializer_list<std::string_view> context, const AttributeUniverse& universe) {
  return Rule(encode_itemset(plus, universe), encode_itemset(minus, universe), encode_itemset(context, universe));
}

Rule Rule::inverse() const { return Rule(minus_, plus_, context_); }

std::size_t Rule::hash() const noexcept {
  std::size_t h = plus_.bits().hash();
  h = h * 31 + minus_.bits().hash();
  h = h * 31 + context_.bits().hash();
  return h;
}

bool rule_agrees(const Rule& rule, const Itemset& t, const Itemset& u) noexcept {
  const auto& plus = rule.plus().bits().words();
  const auto& minus = rule.minus().bits().words();
  const auto& ctx = rule.context().bits().words();
  const auto& tw = t.bits().words();
  const auto& uw = u.bits().words();
  for (std::size_t i = 0; i < tw.size(); ++i) {
    if (((plus[i] | ctx[i]) & ~tw[i]) != 0) return false;
    if (((minus[i] | ctx[i]) & ~uw[i]) != 0) return false;
    if ((minus[i] & tw[i]) != 0) return false;
    if ((plus[i] & uw[i]) != 0) return false;
  }
  return true;
}

bool rule_agrees(const Rule& rule, const PreferencePair& pair, const PreferenceDatabase& db) {
  const auto& t = db.transaction(pair.preferred);
  const auto& u = db.transaction(pair.dominated);
  return rule_agrees(rule, t.items, u.items);
}

// ---------------------------------------------------------------------------
// Text form

std::string slot_text(const Itemset& items, const AttributeUniverse& universe) {
  std::string out;
  items.bits().for_each_set([&](std::size_t pos) {
    if (!out.empty()) out += ',';
    out += universe.name(pos);
  });
  return out;
}

std::string to_text(const Rule& rule, const AttributeUniverse& universe) {
  std::string ctx = rule.context().empty() ? std::string("NULL") : slot_text(rule.context(), universe);
  return slot_text(rule.plus(), universe) + " > " + slot_text(rule.minus(), universe) + " | " + ctx;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

Itemset parse_slot(std::string_view text, const AttributeUniverse& universe) {
  Itemset out(universe.size());
  text = trim(text);
  if (text.empty() || text == "NULL") return out;
  while (true) {
    const auto comma = text.find(',');
    out.insert(universe.index_of(trim(text.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

Rule parse_rule(std::string_view text, const AttributeUniverse& universe) {
  const auto gt = text.find(" > ");
  const auto bar = text.rfind(" | ");
  if (gt == std::string_view::npos || bar == std::string_view::npos || bar < gt) {
    throw Error(ErrorKind::InvalidRule, "cannot parse rule text '" + std::string(text) + "'");
  }
  return Rule(parse_slot(text.substr(0, gt), universe), parse_slot(text.substr(gt + 3, bar - gt - 3), universe),
              parse_slot(text.substr(bar + 3), universe));
}

// ---------------------------------------------------------------------------
// RuleSet

RuleSet RuleSet::canonical(std::vector<Rule> rules, std::span<const double> supports,
                           const AttributeUniverse& universe) {
  if (supports.size() != rules.size()) {
    throw Error(ErrorKind::InvalidConfig, "support list does not match rule list");
  }
  struct Keyed {
    double support;
    std::string text;
    std::size_t index;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(rules.size());
  for (std::size_t i = 0; i < rules.size(); ++i) keyed.push_back({supports[i], to_text(rules[i], universe), i});
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.support != b.support) return a.support > b.support;
    return a.text < b.text;
  });
  RuleSet out;
  out.rules_.reserve(rules.size());
  std::unordered_set<std::string_view> seen;
  for (const auto& k : keyed) {
    if (!seen.insert(k.text).second) continue;
    out.rules_.push_back(std::move(rules[k.index]));
  }
  return out;
}

RuleSet RuleSet::in_order(std::vector<Rule> rules) {
  RuleSet out;
  std::unordered_set<Rule, RuleHash> seen;
  out.rules_.reserve(rules.size());
  for (auto& r : rules) {
    if (seen.insert(r).second) out.rules_.push_back(std::move(r));
  }
  return out;
}

bool RuleSet::contains(const Rule& rule) const { return std::find(rules_.begin(), rules_.end(), rule) != rules_.end(); }

}  // namespace cpref
