#include "cpref/eval.hpp"

#include <algorithm>
#include <cmath>

#include "cpref/measures.hpp"
#include "cpref/parallel.hpp"

namespace cpref {

namespace {

struct Coverage {
  BitVector forward;
  BitVector reverse;
};

Coverage coverage(std::span<const Rule> rules, const PreferenceDatabase& db) {
  const PairIndex index(db);
  Coverage c{BitVector(db.size()), BitVector(db.size())};
  for (const auto& r : rules) {
    c.forward |= index.agreement(r);
    c.reverse |= index.agreement(r.inverse());
  }
  return c;
}

Verdict verdict_of(bool forward, bool reverse) {
  if (forward && reverse) return Verdict::Both;
  if (forward) return Verdict::Agree;
  if (reverse) return Verdict::Reverse;
  return Verdict::None;
}

}  // namespace

Verdict ruleset_predicts(const RuleSet& rules, const PreferencePair& pair, const PreferenceDatabase& db) {
  const auto& t = db.transaction(pair.preferred).items;
  const auto& u = db.transaction(pair.dominated).items;
  bool forward = false;
  bool reverse = false;
  for (const auto& r : rules) {
    forward = forward || rule_agrees(r, t, u);
    reverse = reverse || rule_agrees(r, u, t);
  }
  return verdict_of(forward, reverse);
}

std::vector<Verdict> verdicts(std::span<const Rule> rules, const PreferenceDatabase& db) {
  const auto c = coverage(rules, db);
  std::vector<Verdict> out(db.size());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = verdict_of(c.forward.test(p), c.reverse.test(p));
  return out;
}

std::vector<Verdict> verdicts(const RuleSet& rules, const PreferenceDatabase& db) {
  return verdicts(rules.rules(), db);
}

EvalReport evaluate(std::span<const Rule> rules, const PreferenceDatabase& db) {
  if (db.empty()) throw Error(ErrorKind::EmptyDatabase, "evaluation database has no pairs");
  const auto c = coverage(rules, db);
  EvalReport rep;
  rep.pairs = db.size();
  rep.covered_agree = c.forward.count();
  rep.covered_any = (c.forward | c.reverse).count();
  rep.recall = static_cast<double>(rep.covered_agree) / static_cast<double>(rep.pairs);
  if (rep.covered_any > 0) {
    rep.precision = static_cast<double>(rep.covered_agree) / static_cast<double>(rep.covered_any);
  }
  rep.f1 = f1(rep.precision, rep.recall);
  if (rep.covered_agree > 0) {
    double gap = 0.0;
    const auto pairs = db.pairs();
    c.forward.for_each_set([&](std::size_t p) {
      gap += std::abs(db.transaction(pairs[p].preferred).rating - db.transaction(pairs[p].dominated).rating);
    });
    rep.favoritism = gap / static_cast<double>(rep.covered_agree);
  }
  return rep;
}

double recall(const RuleSet& rules, const PreferenceDatabase& db) { return evaluate(rules.rules(), db).recall; }

std::optional<double> precision(const RuleSet& rules, const PreferenceDatabase& db) {
  return evaluate(rules.rules(), db).precision;
}

std::optional<double> f1(std::optional<double> precision, double recall) {
  if (!precision || *precision + recall == 0.0) return std::nullopt;
  return *precision * recall / (*precision + recall);
}

std::optional<double> standard_f1(std::optional<double> precision, double recall) {
  auto half = f1(precision, recall);
  if (!half) return std::nullopt;
  return 2.0 * *half;
}

std::optional<double> favoritism(const RuleSet& rules, const PreferenceDatabase& db) {
  return evaluate(rules.rules(), db).favoritism;
}

std::string_view to_string(TopKKey key) noexcept {
  switch (key) {
    case TopKKey::Eta: return "eta";
    case TopKKey::Belief: return "belief";
    case TopKKey::AbsDeviation: return "dev";
    case TopKKey::Raw: return "raw";
  }
  return "raw";
}

namespace {

struct UserMetrics {
  std::optional<double> recall;
  std::optional<double> precision;
  std::optional<double> f1;
  std::optional<double> standard_f1;
  std::optional<double> favoritism;
};

std::vector<Rule> first_k(const std::vector<ScoredRule>& scored, std::size_t k, TopKKey key,
                          const AttributeUniverse& universe) {
  std::vector<Rule> out;
  if (key == TopKKey::Raw) {
    for (std::size_t i = 0; i < std::min(k, scored.size()); ++i) out.push_back(scored[i].rule);
    return out;
  }
  const RankKey rk = key == TopKKey::Eta ? RankKey::Eta : key == TopKKey::Belief ? RankKey::Belief : RankKey::AbsDeviation;
  for (auto& s : rank_topk(scored, k, rk, universe)) out.push_back(std::move(s.rule));
  return out;
}

}  // namespace

std::vector<TopKRow> topk_experiment(const std::map<std::string, std::vector<ScoredRule>>& scored_per_user,
                                     const std::map<std::string, UserSplit>& splits, const AttributeUniverse& universe,
                                     const TopKOptions& options) {
  std::vector<const std::string*> users;
  for (const auto& [user, scored] : scored_per_user) {
    auto it = splits.find(user);
    if (it == splits.end() || !it->second.train || !it->second.test) throw Error(ErrorKind::MissingSplit, user);
    users.push_back(&user);
  }

  const std::size_t nk = options.keys.size() * options.ks.size();
  // metrics[u][cell], cell = key index * |Ks| + K index
  std::vector<std::vector<UserMetrics>> metrics(users.size(), std::vector<UserMetrics>(nk));
  parallel_for(users.size(), options.jobs, [&](std::size_t ui) {
    const auto& scored = scored_per_user.at(*users[ui]);
    const auto& split = splits.at(*users[ui]);
    for (std::size_t ki = 0; ki < options.keys.size(); ++ki) {
      for (std::size_t kk = 0; kk < options.ks.size(); ++kk) {
        const auto top = first_k(scored, options.ks[kk], options.keys[ki], universe);
        auto& m = metrics[ui][ki * options.ks.size() + kk];
        if (!split.test->empty()) {
          const auto rep = evaluate(top, *split.test);
          m.recall = rep.recall;
          m.precision = rep.precision;
          m.f1 = rep.f1;
          m.standard_f1 = standard_f1(rep.precision, rep.recall);
        }
        if (!split.train->empty()) m.favoritism = evaluate(top, *split.train).favoritism;
      }
    }
  });

  auto mean = [&](std::size_t cell, std::optional<double> UserMetrics::*field) -> std::optional<double> {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& per_user : metrics) {
      if (const auto& v = per_user[cell].*field) {
        sum += *v;
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  };

  std::vector<TopKRow> rows;
  for (std::size_t ki = 0; ki < options.keys.size(); ++ki) {
    for (std::size_t kk = 0; kk < options.ks.size(); ++kk) {
      const std::size_t cell = ki * options.ks.size() + kk;
      const auto key = options.keys[ki];
      const auto k = options.ks[kk];
      rows.push_back({key, k, "recall", mean(cell, &UserMetrics::recall)});
      rows.push_back({key, k, "precision", mean(cell, &UserMetrics::precision)});
      rows.push_back({key, k, "f1", mean(cell, &UserMetrics::f1)});
      if (options.standard_f1) rows.push_back({key, k, "standard_f1", mean(cell, &UserMetrics::standard_f1)});
      rows.push_back({key, k, "favoritism", mean(cell, &UserMetrics::favoritism)});
    }
  }
  return rows;
}

}  // namespace cpref
