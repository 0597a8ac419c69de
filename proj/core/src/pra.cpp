#include "cpref/pra.hpp"

#include <cmath>

#include "cpref/parallel.hpp"

namespace cpref {

double resolve_mindis(const RuleSet& rules, const Measures& measures, const PraConfig& cfg) {
  if (rules.empty()) throw Error(ErrorKind::EmptyRuleset, "cannot resolve mindis for an empty ruleset");
  if (cfg.mindis) {
    if (*cfg.mindis < 0.0 || !std::isfinite(*cfg.mindis)) {
      throw Error(ErrorKind::InvalidConfig, "mindis must be a finite value >= 0");
    }
    return *cfg.mindis;
  }
  double total = 0.0;
  for (const auto& r : rules) total += measures.support(r);
  return PraConfig::kAutoFactor * total / static_cast<double>(rules.size());
}

namespace {

bool exceeds(const Ratio& r, double threshold) { return r.value() > threshold; }

}  // namespace

PraResult pra_aggregate(const RuleSet& input, const Measures& measures, const PraConfig& cfg) {
  if (input.size() < 2) throw Error(ErrorKind::TooFewRules, "PRA needs at least two rules");
  if (measures.size() == 0) throw Error(ErrorKind::EmptyDatabase, "preference database has no pairs");

  const auto& universe = measures.database().universe();
  std::vector<double> supports;
  supports.reserve(input.size());
  for (const auto& r : input) supports.push_back(measures.support(r));
  const RuleSet rules = RuleSet::canonical({input.begin(), input.end()}, supports, universe);
  const std::size_t n = rules.size();
  const std::uint64_t pairs = measures.size();

  PraResult result;
  result.trace.mindis = resolve_mindis(rules, measures, cfg);
  const double mindis = result.trace.mindis;

  std::vector<std::uint64_t> agree(n);
  for (std::size_t i = 0; i < n; ++i) agree[i] = measures.agree_count(rules[i]);
  // Joint agreement counts; row i is filled by one worker.
  std::vector<std::uint64_t> joint(n * n, 0);
  parallel_for(n, cfg.jobs, [&](std::size_t i) {
    const auto& ai = measures.agreement(rules[i]);
    for (std::size_t j = i + 1; j < n; ++j) joint[i * n + j] = and_count(ai, measures.agreement(rules[j]));
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) joint[j * n + i] = joint[i * n + j];
  }

  // Seeding: pair {i, j} has distance sum (a_i - c_ij) + (a_j - c_ij) over 2 * |xi|.
  std::optional<std::pair<std::size_t, std::size_t>> seed;
  Ratio best;
  bool have_best = false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Ratio d{agree[i] + agree[j] - 2 * joint[i * n + j], 2 * pairs};
      if (!exceeds(d, mindis)) continue;
      if (!have_best || d > best) {
        best = d;
        have_best = true;
        seed = {i, j};
      }
    }
  }
  if (!seed) return result;

  std::vector<char> selected(n, 0);
  std::vector<std::size_t> members = {seed->first, seed->second};
  selected[seed->first] = selected[seed->second] = 1;
  result.trace.seed_pair.emplace(rules[seed->first], rules[seed->second]);
  result.trace.seed_avgdis = best;

  // Running sums: dist_sum = sum over ordered member pairs of (a_i - c_ij);
  // agree_sum = sum of member agree counts; joint_to[k] = sum over members of c_ik.
  std::uint64_t dist_sum = best.num;
  std::uint64_t agree_sum = agree[seed->first] + agree[seed->second];
  std::vector<std::uint64_t> joint_to(n, 0);
  for (std::size_t k = 0; k < n; ++k) joint_to[k] = joint[seed->first * n + k] + joint[seed->second * n + k];

  Ratio current = best;
  while (true) {
    const std::uint64_t size = members.size();
    std::optional<std::size_t> pick;
    Ratio pick_value;
    for (std::size_t k = 0; k < n; ++k) {
      if (selected[k]) continue;
      // Adding k contributes (a_i - c_ik) and (a_k - c_ik) for every member i.
      const std::uint64_t sum = dist_sum + agree_sum + size * agree[k] - 2 * joint_to[k];
      const Ratio d{sum, pairs * (size + 1) * size};
      if (!exceeds(d, mindis)) continue;
      if (!pick || d > pick_value) {
        pick = k;
        pick_value = d;
      }
    }
    if (!pick) break;
    const std::size_t k = *pick;
    selected[k] = 1;
    members.push_back(k);
    dist_sum = pick_value.num;
    agree_sum += agree[k];
    for (std::size_t x = 0; x < n; ++x) joint_to[x] += joint[k * n + x];
    current = pick_value;
    result.trace.additions.push_back({rules[k], pick_value});
  }
  result.trace.final_avgdis = current;

  std::vector<Rule> kept;
  std::vector<double> kept_support;
  for (std::size_t k = 0; k < n; ++k) {
    if (!selected[k]) continue;
    kept.push_back(rules[k]);
    kept_support.push_back(measures.support(rules[k]));
  }
  result.rules = RuleSet::canonical(std::move(kept), kept_support, universe);
  return result;
}

}  // namespace cpref
