#pragma once

// Synthetic per-user preference data with known rules planted in it. Every
// planted pair is exactly <X+i+, X+i-> for its rule, so the rule (and nothing
// structurally unrelated) agrees with it.

#include <cstdio>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <cpref/ingest.hpp>
#include <cpref/snapshot.hpp>

#include "generators.hpp"

namespace cpref::testing {

struct PlantedUser {
  std::string user;
  Rule unique;
  std::shared_ptr<const PreferenceDatabase> db;
};

struct PlantedData {
  std::shared_ptr<const AttributeUniverse> universe;
  std::vector<Rule> shared;
  std::vector<PlantedUser> users;
};

struct PlantedOptions {
  std::size_t users = 200;
  std::uint64_t seed = 2024;
  double noise = 0.1;
  // Inclusive ranges of pairs per rule and user.
  std::size_t shared_min = 2, shared_max = 4;
  std::size_t unique_min = 3, unique_max = 6;
};

inline PlantedData planted_data(const PlantedOptions& opt = {}) {
  std::vector<std::string> names;
  for (int i = 0; i < 12; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "a%02d", i);
    names.emplace_back(buf);
  }
  PlantedData out;
  out.universe = std::make_shared<const AttributeUniverse>(names);
  const auto& u = *out.universe;
  out.shared = {
      Rule::from_names({"a00"}, {"a01"}, {}, u),    Rule::from_names({"a02"}, {"a03"}, {}, u),
      Rule::from_names({"a04"}, {"a05"}, {"a10"}, u), Rule::from_names({"a05"}, {"a04"}, {"a11"}, u),
      Rule::from_names({"a06"}, {"a07"}, {}, u),
  };
  // plus/minus combinations the unique rules must stay clear of, in both directions
  std::set<std::pair<std::size_t, std::size_t>> taken;
  for (const auto& r : out.shared) {
    const auto p = r.plus().positions()[0], m = r.minus().positions()[0];
    taken.insert({p, m});
    taken.insert({m, p});
  }

  Rng rng(opt.seed);
  const std::size_t m = u.size();
  for (std::size_t k = 0; k < opt.users; ++k) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "u%03zu", k);
    const std::string user = buf;

    std::size_t x, y, c;
    do {
      x = draw(rng, m);
      y = draw(rng, m);
      c = draw(rng, m);
    } while (x == y || c == x || c == y || taken.count({x, y}));
    Itemset px(m), my(m), cz(m);
    px.insert(x);
    my.insert(y);
    cz.insert(c);
    Rule unique(px, my, cz);

    std::vector<Transaction> txs;
    std::vector<PreferencePair> pairs;
    auto add_pair = [&](const Itemset& t, const Itemset& v) {
      const auto i = static_cast<TxIndex>(txs.size());
      const std::string base = user + ":p" + std::to_string(pairs.size());
      txs.push_back({base + "t", user, t, 5.0});
      txs.push_back({base + "u", user, v, static_cast<double>(1 + draw(rng, 3))});
      pairs.push_back({i, i + 1});
    };
    auto plant = [&](const Rule& r, std::size_t lo, std::size_t hi) {
      const std::size_t n = lo + draw(rng, hi - lo + 1);
      for (std::size_t i = 0; i < n; ++i) add_pair(r.context() | r.plus(), r.context() | r.minus());
    };
    for (const auto& r : out.shared) plant(r, opt.shared_min, opt.shared_max);
    plant(unique, opt.unique_min, opt.unique_max);
    const auto noise = static_cast<std::size_t>(opt.noise * static_cast<double>(pairs.size()) + 0.5);
    for (std::size_t i = 0; i < noise; ++i) add_pair(random_itemset(rng, m, 0.2), random_itemset(rng, m, 0.2));

    out.users.push_back(
        {user, unique, std::make_shared<const PreferenceDatabase>(out.universe, std::move(txs), std::move(pairs))});
  }
  return out;
}

// Seeded train/test split of every user, ready for write_preferences.
inline PreferenceSnapshot planted_snapshot(const PlantedData& data, const IngestConfig& cfg) {
  PreferenceSnapshot snap;
  snap.universe = data.universe;
  for (const auto& pu : data.users) {
    auto tt = split(UserPreferenceSet{pu.user, pu.db}, cfg);
    snap.users.push_back({pu.user, std::make_shared<const PreferenceDatabase>(std::move(tt.train)),
                          std::make_shared<const PreferenceDatabase>(std::move(tt.test))});
  }
  return snap;
}

}  // namespace cpref::testing
