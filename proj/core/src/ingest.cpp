#include "cpref/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

#include "cpref/csv.hpp"

namespace cpref {

namespace {

constexpr double kSlack = 1e-9;

std::vector<std::string> split_ml(std::string_view line) {
  std::vector<std::string> out;
  while (true) {
    const auto pos = line.find("::");
    out.emplace_back(line.substr(0, pos));
    if (pos == std::string_view::npos) break;
    line.remove_prefix(pos + 2);
  }
  return out;
}

std::vector<std::string> fields_of(std::string_view line, bool movielens) {
  auto out = movielens ? split_ml(line) : csv::split(line);
  for (auto& f : out) f = std::string(csv::trim(f));
  return out;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

[[noreturn]] void malformed(std::string_view source, std::size_t line_no, std::string_view what) {
  throw Error(ErrorKind::MalformedRow,
              std::string(source) + " line " + std::to_string(line_no) + ": " + std::string(what));
}

struct ItemTable {
  std::unordered_map<std::string, std::vector<std::string>> attributes;
  // Every attribute seen, in file order, possibly repeated.
  std::vector<std::string> all;
};

ItemTable read_items(std::istream& in) {
  ItemTable table;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  bool movielens = false;
  while (csv::next_line(in, line, line_no)) {
    if (first) movielens = line.find("::") != std::string::npos;
    const auto fields = fields_of(line, movielens);
    if (first) {
      first = false;
      static const std::vector<std::string> headers{"item", "itemid", "item_id", "movieid", "movie_id", "id"};
      if (!movielens && std::find(headers.begin(), headers.end(), lower(fields[0])) != headers.end()) continue;
    }
    if (fields.size() < 2 || fields[0].empty()) malformed("items", line_no, "expected item id and attribute list");
    std::vector<std::string> attrs;
    if (fields.back() != "(no genres listed)") {
      std::string_view rest = fields.back();
      while (true) {
        const auto bar = rest.find('|');
        const auto name = csv::trim(rest.substr(0, bar));
        if (!name.empty()) attrs.emplace_back(name);
        if (bar == std::string_view::npos) break;
        rest.remove_prefix(bar + 1);
      }
    }
    std::sort(attrs.begin(), attrs.end());
    attrs.erase(std::unique(attrs.begin(), attrs.end()), attrs.end());
    table.all.insert(table.all.end(), attrs.begin(), attrs.end());
    if (!table.attributes.emplace(fields[0], std::move(attrs)).second) {
      malformed("items", line_no, "duplicate item id " + fields[0]);
    }
  }
  return table;
}

struct RatingEvent {
  std::string user;
  std::string item;
  double rating;
  std::optional<double> timestamp;
};

std::vector<RatingEvent> read_ratings(std::istream& in) {
  std::vector<RatingEvent> out;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  bool movielens = false;
  while (csv::next_line(in, line, line_no)) {
    if (first) movielens = line.find("::") != std::string::npos;
    const auto fields = fields_of(line, movielens);
    const bool header_candidate = first && !movielens;
    first = false;
    if (fields.size() < 3) {
      if (header_candidate) continue;
      malformed("ratings", line_no, "expected user, item, rating");
    }
    const auto rating = csv::parse_double(fields[2]);
    if (!rating || !std::isfinite(*rating)) {
      if (header_candidate) continue;
      malformed("ratings", line_no, "rating '" + fields[2] + "' is not a number");
    }
    RatingEvent ev{fields[0], fields[1], *rating, std::nullopt};
    if (ev.user.empty() || ev.item.empty()) malformed("ratings", line_no, "empty user or item id");
    if (fields.size() >= 4 && !fields[3].empty()) {
      ev.timestamp = csv::parse_double(fields[3]);
      if (!ev.timestamp) malformed("ratings", line_no, "timestamp '" + fields[3] + "' is not a number");
    }
    out.push_back(std::move(ev));
  }
  return out;
}

// Uniform draw from [0, n) by rejection on raw 64-bit outputs, so results do
// not depend on the standard library's distribution implementation.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

// Sorted positions of a uniform random k-subset of [0, n).
std::vector<std::size_t> sample_positions(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(bounded(rng, n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::mt19937_64 user_rng(std::uint64_t seed, std::string_view user, std::uint64_t salt) {
  return std::mt19937_64(splitmix64(seed ^ fnv1a64(user) ^ salt));
}

constexpr std::uint64_t kSampleSalt = 0x73616d706c65ULL;
constexpr std::uint64_t kSplitSalt = 0x73706c6974ULL;

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) noexcept {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

LoadedRatings load_transactions(std::istream& ratings, std::istream& items, const LoadOptions& options) {
  const auto table = read_items(items);
  const auto events = read_ratings(ratings);

  // Collapse repeated (user, item) events; first appearance fixes the position.
  std::vector<std::string> users;
  std::unordered_map<std::string, std::vector<std::size_t>> per_user;  // positions in `kept`
  std::unordered_map<std::string, std::size_t> slot;                   // "user\x1fitem" -> position
  std::vector<RatingEvent> kept;
  for (const auto& ev : events) {
    if (table.attributes.find(ev.item) == table.attributes.end()) throw Error(ErrorKind::UnknownItem, ev.item);
    const auto key = ev.user + '\x1f' + ev.item;
    auto [it, inserted] = slot.try_emplace(key, kept.size());
    if (inserted) {
      auto [u, fresh] = per_user.try_emplace(ev.user);
      if (fresh) users.push_back(ev.user);
      u->second.push_back(kept.size());
      kept.push_back(ev);
      continue;
    }
    auto& prev = kept[it->second];
    const bool older = prev.timestamp && ev.timestamp && *ev.timestamp < *prev.timestamp;
    if (!older) prev = ev;
  }

  std::vector<std::string> names;
  if (options.universe == UniversePolicy::AllItemAttributes) {
    names = table.all;
  } else {
    for (const auto& ev : kept) {
      const auto& attrs = table.attributes.at(ev.item);
      names.insert(names.end(), attrs.begin(), attrs.end());
    }
  }
  auto universe = std::make_shared<const AttributeUniverse>(std::move(names));

  LoadedRatings out;
  out.universe = universe;
  out.transactions.reserve(kept.size());
  for (const auto& user : users) {
    for (std::size_t pos : per_user.at(user)) {
      const auto& ev = kept[pos];
      out.transactions.push_back(
          {ev.user + ":" + ev.item, ev.user, encode_itemset(table.attributes.at(ev.item), *universe), ev.rating});
    }
  }
  return out;
}

LoadedRatings load_transaction_files(const std::filesystem::path& ratings, const std::filesystem::path& items,
                                     const LoadOptions& options) {
  std::ifstream r(ratings);
  if (!r) throw Error(ErrorKind::Io, "cannot open ratings file " + ratings.string());
  std::ifstream i(items);
  if (!i) throw Error(ErrorKind::Io, "cannot open items file " + items.string());
  return load_transactions(r, i, options);
}

void IngestConfig::validate() const {
  if (!std::isfinite(high_rating_threshold)) throw Error(ErrorKind::InvalidConfig, "high rating threshold must be finite");
  if (!(min_gap > 0.0) || !std::isfinite(min_gap)) throw Error(ErrorKind::InvalidConfig, "min_gap must be > 0");
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw Error(ErrorKind::InvalidConfig, "split ratio must be in (0,1)");
  if (max_pairs_per_user && *max_pairs_per_user == 0) {
    throw Error(ErrorKind::InvalidConfig, "max_pairs_per_user must be positive");
  }
}

bool qualifies(double t_rating, double u_rating, const IngestConfig& cfg) noexcept {
  return t_rating >= cfg.high_rating_threshold - kSlack && t_rating - u_rating > cfg.min_gap + kSlack;
}

std::vector<UserPreferenceSet> build_preferences(const LoadedRatings& loaded, const IngestConfig& cfg) {
  cfg.validate();
  std::vector<UserPreferenceSet> out;
  const auto& all = loaded.transactions;
  std::size_t begin = 0;
  std::unordered_map<std::string, bool> seen;
  while (begin < all.size()) {
    std::size_t end = begin;
    while (end < all.size() && all[end].user == all[begin].user) ++end;
    const std::string& user = all[begin].user;
    if (!seen.emplace(user, true).second) {
      throw Error(ErrorKind::MalformedRow, "transactions of user " + user + " are not contiguous");
    }
    std::vector<Transaction> txs(all.begin() + static_cast<std::ptrdiff_t>(begin),
                                 all.begin() + static_cast<std::ptrdiff_t>(end));
    std::vector<PreferencePair> pairs;
    for (std::size_t t = 0; t < txs.size(); ++t) {
      if (txs[t].rating < cfg.high_rating_threshold - kSlack) continue;
      for (std::size_t u = 0; u < txs.size(); ++u) {
        if (qualifies(txs[t].rating, txs[u].rating, cfg)) {
          pairs.push_back({static_cast<TxIndex>(t), static_cast<TxIndex>(u)});
        }
      }
    }
    if (cfg.max_pairs_per_user && pairs.size() > *cfg.max_pairs_per_user) {
      auto rng = user_rng(cfg.seed, user, kSampleSalt);
      std::vector<PreferencePair> sampled;
      for (std::size_t p : sample_positions(pairs.size(), *cfg.max_pairs_per_user, rng)) sampled.push_back(pairs[p]);
      pairs = std::move(sampled);
    }
    out.push_back({user, std::make_shared<const PreferenceDatabase>(loaded.universe, std::move(txs), std::move(pairs))});
    begin = end;
  }
  return out;
}

PreferenceDatabase merge_databases(std::span<const PreferenceDatabase* const> dbs) {
  if (dbs.empty()) return PreferenceDatabase();
  const auto universe = dbs.front()->shared_universe();
  std::vector<Transaction> txs;
  std::vector<PreferencePair> pairs;
  for (const auto* db : dbs) {
    if (db->shared_universe() != universe && !(db->universe() == *universe)) {
      throw Error(ErrorKind::UniverseMismatch, "databases use different attribute universes");
    }
    const auto offset = static_cast<TxIndex>(txs.size());
    txs.insert(txs.end(), db->transactions().begin(), db->transactions().end());
    for (const auto& p : db->pairs()) pairs.push_back({p.preferred + offset, p.dominated + offset});
  }
  return PreferenceDatabase(universe, std::move(txs), std::move(pairs));
}

PreferenceDatabase merge_users(std::span<const UserPreferenceSet> sets) {
  std::vector<const PreferenceDatabase*> dbs;
  dbs.reserve(sets.size());
  for (const auto& s : sets) dbs.push_back(s.db.get());
  return merge_databases(dbs);
}

TrainTest split(const UserPreferenceSet& set, const IngestConfig& cfg) {
  cfg.validate();
  const auto pairs = set.db->pairs();
  const std::size_t n = pairs.size();
  const auto train_n =
      std::min(n, static_cast<std::size_t>(std::ceil(cfg.split_ratio * static_cast<double>(n) - kSlack)));
  auto rng = user_rng(cfg.seed, set.user, kSplitSalt);
  const auto train_pos = sample_positions(n, train_n, rng);
  std::vector<bool> in_train(n, false);
  for (auto p : train_pos) in_train[p] = true;
  std::vector<PreferencePair> train;
  std::vector<PreferencePair> test;
  for (std::size_t p = 0; p < n; ++p) (in_train[p] ? train : test).push_back(pairs[p]);
  return {set.db->with_pairs(std::move(train)), set.db->with_pairs(std::move(test))};
}

}  // namespace cpref
