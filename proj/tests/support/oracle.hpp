#pragma once

// Deliberately naive reference implementations used only by tests. They work
// on std::set<std::string> and exact fractions and share no code with the
// library beyond the input types.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <cpref/model.hpp>

namespace cpref::oracle {

using Set = std::set<std::string>;

struct Frac {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Frac() = default;
  Frac(std::int64_t n, std::int64_t d) : num(n), den(d) {
    const auto g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Frac& a, const Frac& b) { return a.num * b.den == b.num * a.den; }
  friend bool operator<(const Frac& a, const Frac& b) { return a.num * b.den < b.num * a.den; }
  friend bool operator>(const Frac& a, const Frac& b) { return b < a; }
};

struct ORule {
  Set plus;
  Set minus;
  Set ctx;
};

struct OPair {
  Set t;
  Set u;
  double t_rating = 0.0;
  double u_rating = 0.0;
};

inline bool contains_all(const Set& big, const Set& small) {
  for (const auto& x : small) {
    if (!big.count(x)) return false;
  }
  return true;
}

inline bool disjoint(const Set& a, const Set& b) {
  for (const auto& x : a) {
    if (b.count(x)) return false;
  }
  return true;
}

inline bool agrees(const ORule& r, const OPair& p) {
  return contains_all(p.t, r.ctx) && contains_all(p.t, r.plus) && contains_all(p.u, r.ctx) &&
         contains_all(p.u, r.minus) && disjoint(p.t, r.minus) && disjoint(p.u, r.plus);
}

inline ORule inverse(const ORule& r) { return {r.minus, r.plus, r.ctx}; }

inline std::int64_t agree_count(const ORule& r, const std::vector<OPair>& db) {
  std::int64_t n = 0;
  for (const auto& p : db) n += agrees(r, p) ? 1 : 0;
  return n;
}

inline std::int64_t joint_count(const ORule& a, const ORule& b, const std::vector<OPair>& db) {
  std::int64_t n = 0;
  for (const auto& p : db) n += agrees(a, p) && agrees(b, p) ? 1 : 0;
  return n;
}

inline Frac support(const ORule& r, const std::vector<OPair>& db) {
  return Frac(agree_count(r, db), static_cast<std::int64_t>(db.size()));
}

inline std::optional<Frac> confidence(const ORule& r, const std::vector<OPair>& db) {
  const auto a = agree_count(r, db);
  const auto b = agree_count(inverse(r), db);
  if (a + b == 0) return std::nullopt;
  return Frac(a, a + b);
}

inline Frac joint(const ORule& a, const ORule& b, const std::vector<OPair>& db) {
  return Frac(joint_count(a, b, db), static_cast<std::int64_t>(db.size()));
}

inline Frac distance(const ORule& a, const ORule& b, const std::vector<OPair>& db) {
  return Frac(agree_count(a, db) - joint_count(a, b, db), static_cast<std::int64_t>(db.size()));
}

// Sum over ordered pairs i != j of dis(i -> j), divided by n(n-1).
inline Frac avg_internal_distance(const std::vector<ORule>& rules, const std::vector<OPair>& db) {
  const auto n = static_cast<std::int64_t>(rules.size());
  const auto N = static_cast<std::int64_t>(db.size());
  std::int64_t total = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < n; ++j) {
      if (i == j) continue;
      total += agree_count(rules[i], db) - joint_count(rules[i], rules[j], db);
    }
  }
  return Frac(total, N * n * (n - 1));
}

// Pearson correlation of two 0/1 vectors, straight from the textbook formula.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

inline std::vector<double> indicator(const ORule& r, const std::vector<OPair>& db) {
  std::vector<double> out;
  for (const auto& p : db) out.push_back(agrees(r, p) ? 1.0 : 0.0);
  return out;
}

// Plain cosine between the concatenated (plus | minus | context) 0/1 vectors.
inline double vector_cosine(const ORule& a, const ORule& b, const std::vector<std::string>& universe) {
  std::vector<double> va, vb;
  for (const Set* s : {&a.plus, &a.minus, &a.ctx}) {
    for (const auto& name : universe) va.push_back(s->count(name) ? 1.0 : 0.0);
  }
  for (const Set* s : {&b.plus, &b.minus, &b.ctx}) {
    for (const auto& name : universe) vb.push_back(s->count(name) ? 1.0 : 0.0);
  }
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    dot += va[i] * vb[i];
    na += va[i] * va[i];
    nb += vb[i] * vb[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Weighted overlap of the three slots over the geometric mean of the rule sizes.
inline double weighted_cosine(const ORule& a, const ORule& b, double k1, double k2, double k3) {
  auto overlap = [](const Set& x, const Set& y) {
    double n = 0;
    for (const auto& e : x) n += y.count(e) ? 1 : 0;
    return n;
  };
  const double na = static_cast<double>(a.plus.size() + a.minus.size() + a.ctx.size());
  const double nb = static_cast<double>(b.plus.size() + b.minus.size() + b.ctx.size());
  return (k1 * overlap(a.plus, b.plus) + k2 * overlap(a.minus, b.minus) + k3 * overlap(a.ctx, b.ctx)) /
         std::sqrt(na * nb);
}

// Conversions from library types.
inline Set to_set(const Itemset& items, const AttributeUniverse& u) {
  Set out;
  for (const auto& n : decode_itemset(items, u)) out.insert(n);
  return out;
}

inline ORule to_oracle(const Rule& r, const AttributeUniverse& u) {
  return {to_set(r.plus(), u), to_set(r.minus(), u), to_set(r.context(), u)};
}

inline std::vector<OPair> to_oracle(const PreferenceDatabase& db) {
  std::vector<OPair> out;
  for (const auto& p : db.pairs()) {
    const auto& t = db.transaction(p.preferred);
    const auto& u = db.transaction(p.dominated);
    out.push_back({to_set(t.items, db.universe()), to_set(u.items, db.universe()), t.rating, u.rating});
  }
  return out;
}

inline std::vector<ORule> to_oracle(std::span<const Rule> rules, const AttributeUniverse& u) {
  std::vector<ORule> out;
  for (const auto& r : rules) out.push_back(to_oracle(r, u));
  return out;
}

}  // namespace cpref::oracle
