#include "cpref/miner.hpp"

#include <cmath>
#include <string>
#include <unordered_map>

#include "cpref/parallel.hpp"

namespace cpref {

void MinerConfig::validate() const {
  if (!(min_support > 0.0) || !std::isfinite(min_support)) {
    throw Error(ErrorKind::InvalidConfig, "min_support must be > 0");
  }
  if (!(min_confidence > 0.0) || min_confidence > 1.0) {
    throw Error(ErrorKind::InvalidConfig, "min_confidence must be in (0,1]");
  }
  if (max_side_len < 1) throw Error(ErrorKind::InvalidConfig, "max_side_len must be >= 1");
}

namespace {

// Candidate key: plus positions, separator, minus positions, separator, context positions.
using Key = std::u16string;
constexpr char16_t kSeparator = 0xFFFF;
using CountMap = std::unordered_map<Key, std::uint32_t>;

// Calls fn(subset) for every subset of `items` with size in [lo, hi], in lexicographic order.
template <class F>
void for_each_subset(const std::vector<char16_t>& items, std::size_t lo, std::size_t hi, F&& fn) {
  std::vector<char16_t> current;
  auto recurse = [&](auto&& self, std::size_t start) -> void {
    if (current.size() >= lo) fn(current);
    if (current.size() == hi) return;
    for (std::size_t i = start; i < items.size(); ++i) {
      current.push_back(items[i]);
      self(self, i + 1);
      current.pop_back();
    }
  };
  recurse(recurse, 0);
}

std::vector<char16_t> positions16(const BitVector& bits) {
  std::vector<char16_t> out;
  bits.for_each_set([&](std::size_t p) { out.push_back(static_cast<char16_t>(p)); });
  return out;
}

void generate(const PreferenceDatabase& db, std::size_t begin, std::size_t end, const MinerConfig& cfg,
              CountMap& counts) {
  const auto pairs = db.pairs();
  Key key;
  for (std::size_t p = begin; p < end; ++p) {
    const auto& t = db.transaction(pairs[p].preferred).items;
    const auto& u = db.transaction(pairs[p].dominated).items;
    const auto plus_pool = positions16((t - u).bits());
    const auto minus_pool = positions16((u - t).bits());
    if (plus_pool.empty() || minus_pool.empty()) continue;
    const auto ctx_pool = positions16((t & u).bits());
    for_each_subset(plus_pool, 1, cfg.max_side_len, [&](const std::vector<char16_t>& plus) {
      for_each_subset(minus_pool, 1, cfg.max_side_len, [&](const std::vector<char16_t>& minus) {
        for_each_subset(ctx_pool, 0, cfg.max_context_len, [&](const std::vector<char16_t>& ctx) {
          key.clear();
          key.append(plus.begin(), plus.end());
          key.push_back(kSeparator);
          key.append(minus.begin(), minus.end());
          key.push_back(kSeparator);
          key.append(ctx.begin(), ctx.end());
          ++counts[key];
        });
      });
    });
  }
}

Key inverse_key(const Key& key) {
  const auto first = key.find(kSeparator);
  const auto second = key.find(kSeparator, first + 1);
  Key out = key.substr(first + 1, second - first - 1);
  out.push_back(kSeparator);
  out.append(key, 0, first);
  out.append(key, second);
  return out;
}

Rule decode_key(const Key& key, std::size_t width) {
  Itemset slots[3] = {Itemset(width), Itemset(width), Itemset(width)};
  int slot = 0;
  for (char16_t c : key) {
    if (c == kSeparator) {
      ++slot;
    } else {
      slots[slot].insert(c);
    }
  }
  return Rule(std::move(slots[0]), std::move(slots[1]), std::move(slots[2]));
}

}  // namespace

RuleSet enumerate_rules(const PreferenceDatabase& db, const MinerConfig& cfg) {
  cfg.validate();
  if (db.empty()) throw Error(ErrorKind::EmptyDatabase, "cannot mine an empty preference database");
  if (db.universe().size() >= kSeparator) {
    throw Error(ErrorKind::InvalidConfig, "universe too large for the candidate encoder");
  }

  const unsigned workers = std::min<unsigned>(resolve_jobs(cfg.jobs), static_cast<unsigned>(db.size()));
  std::vector<CountMap> shards(std::max(1u, workers));
  parallel_chunks(db.size(), workers, [&](std::size_t begin, std::size_t end, std::size_t w) {
    generate(db, begin, end, cfg, shards[w]);
  });
  CountMap counts = std::move(shards[0]);
  for (std::size_t s = 1; s < shards.size(); ++s) {
    for (auto& [key, n] : shards[s]) counts[key] += n;
  }

  const double total = static_cast<double>(db.size());
  std::vector<Rule> rules;
  std::vector<double> supports;
  for (const auto& [key, agree] : counts) {
    const double supp = static_cast<double>(agree) / total;
    if (supp < cfg.min_support) continue;
    // Any pair agreeing with the inverse would have generated it as a candidate.
    std::uint32_t against = 0;
    if (auto it = counts.find(inverse_key(key)); it != counts.end()) against = it->second;
    const double conf = static_cast<double>(agree) / static_cast<double>(agree + against);
    if (conf < cfg.min_confidence) continue;
    rules.push_back(decode_key(key, db.universe().size()));
    supports.push_back(supp);
  }
  return RuleSet::canonical(std::move(rules), supports, db.universe());
}

RuleSet mine_consensus(const PreferenceDatabase& merged, const MinerConfig& cfg) {
  return enumerate_rules(merged, cfg);
}

}  // namespace cpref
