#include "cpref/belief.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cpref/parallel.hpp"

namespace cpref {

// ---------------------------------------------------------------------------
// BeliefSystem

BeliefSystem::BeliefSystem(RuleSet rules, std::shared_ptr<const PreferenceDatabase> db)
    : rules_(std::move(rules)), db_(std::move(db)) {
  if (rules_.empty()) throw Error(ErrorKind::EmptySystem, "belief system needs at least one rule");
  if (!db_) throw Error(ErrorKind::EmptySystem, "belief system needs a consensus database");
  measures_ = std::make_unique<Measures>(*db_);
  support_.reserve(rules_.size());
  agreement_.reserve(rules_.size());
  for (const auto& r : rules_) {
    agreement_.push_back(&measures_->agreement(r));
    support_.push_back(db_->empty() ? 0.0 : static_cast<double>(agreement_.back()->count()) /
                                                static_cast<double>(db_->size()));
  }
}

// ---------------------------------------------------------------------------
// ScoringContext

ScoringContext::ScoringContext(const BeliefSystem& system, const PreferenceDatabase& db)
    : system_(&system), db_(&db) {
  const std::size_t n = system.size();
  system_agreement_.reserve(n);
  system_counts_.reserve(n);
  if (&db == &system.database()) {
    index_ = &system.measures().index();
    for (std::size_t i = 0; i < n; ++i) system_agreement_.push_back(&system.agreement(i));
  } else {
    own_index_ = std::make_unique<PairIndex>(db);
    index_ = own_index_.get();
    own_agreement_.reserve(n);
    for (const auto& r : system.rules()) own_agreement_.push_back(index_->agreement(r));
    for (const auto& bits : own_agreement_) system_agreement_.push_back(&bits);
  }
  for (const auto* bits : system_agreement_) system_counts_.push_back(bits->count());
}

// ---------------------------------------------------------------------------
// Belief functions

void BeliefFunction::beliefs(const Rule& rule, const ScoringContext& ctx, std::span<double> out) const {
  const auto& rules = ctx.system().rules();
  for (std::size_t i = 0; i < rules.size(); ++i) out[i] = belief(rule, rules[i], ctx.database());
}

double cosine_belief(const Rule& a, const Rule& b, const CosineWeights& w) {
  const double norm_a = std::sqrt(static_cast<double>(a.plus().size() + a.minus().size() + a.context().size()));
  const double norm_b = std::sqrt(static_cast<double>(b.plus().size() + b.minus().size() + b.context().size()));
  if (norm_a == 0.0 || norm_b == 0.0) throw Error(ErrorKind::ZeroNorm, "rule without any attribute");
  const bool bare = a.context().empty() && b.context().empty();
  const double k1 = bare ? w.bare_k1 : w.k1;
  const double k2 = bare ? w.bare_k2 : w.k2;
  const double k3 = bare ? w.bare_k3 : w.k3;
  const double dot = k1 * static_cast<double>(and_count(a.plus().bits(), b.plus().bits())) +
                     k2 * static_cast<double>(and_count(a.minus().bits(), b.minus().bits())) +
                     k3 * static_cast<double>(and_count(a.context().bits(), b.context().bits()));
  return dot / (norm_a * norm_b);
}

double correlation_from_counts(std::size_t n, std::size_t a, std::size_t b, std::size_t ab, Estimator estimator) {
  if (n < 2) throw Error(ErrorKind::DatabaseTooSmall, "correlation needs at least two pairs");
  const double nn = static_cast<double>(n);
  const double sa = static_cast<double>(a);
  const double sb = static_cast<double>(b);
  const double sab = static_cast<double>(ab);
  // Co-moments of 0/1 indicators: sum (x - mean_x)(y - mean_y) = ab - a*b/n.
  const double comoment = sab - sa * sb / nn;
  const double ss_a = sa - sa * sa / nn;
  const double ss_b = sb - sb * sb / nn;
  if (ss_a <= 0.0 || ss_b <= 0.0) return 0.0;
  const double denom = estimator == Estimator::Unbiased ? nn - 1.0 : nn;
  const double cov = comoment / denom;
  const double sigma_a = std::sqrt(ss_a / denom);
  const double sigma_b = std::sqrt(ss_b / denom);
  return std::min(1.0, std::abs(cov / (sigma_a * sigma_b)));
}

double correlation_belief(const Rule& a, const Rule& b, const Measures& measures) {
  return correlation_from_counts(measures.size(), measures.agree_count(a), measures.agree_count(b),
                                 measures.joint_count(a, b));
}

double correlation_belief(const Rule& a, const Rule& b, const PreferenceDatabase& db) {
  if (db.size() < 2) throw Error(ErrorKind::DatabaseTooSmall, "correlation needs at least two pairs");
  const PairIndex index(db);
  const auto ia = index.agreement(a);
  const auto ib = index.agreement(b);
  return correlation_from_counts(db.size(), ia.count(), ib.count(), and_count(ia, ib));
}

double CosineBelief::belief(const Rule& a, const Rule& b, const PreferenceDatabase&) const {
  return cosine_belief(a, b, weights_);
}

double CorrelationBelief::belief(const Rule& a, const Rule& b, const PreferenceDatabase& db) const {
  if (db.size() < 2) throw Error(ErrorKind::DatabaseTooSmall, "correlation needs at least two pairs");
  const PairIndex index(db);
  const auto ia = index.agreement(a);
  const auto ib = index.agreement(b);
  return correlation_from_counts(db.size(), ia.count(), ib.count(), and_count(ia, ib), estimator_);
}

void CorrelationBelief::beliefs(const Rule& rule, const ScoringContext& ctx, std::span<double> out) const {
  const auto bits = ctx.agreement(rule);
  const std::size_t count = bits.count();
  for (std::size_t i = 0; i < ctx.system().size(); ++i) {
    out[i] = correlation_from_counts(ctx.pairs(), count, ctx.system_agree_count(i),
                                     and_count(bits, ctx.system_agreement(i)), estimator_);
  }
}

// ---------------------------------------------------------------------------
// Registry

namespace {

void reject_unknown(const std::map<std::string, double>& params, std::initializer_list<std::string_view> known,
                    std::string_view fn) {
  for (const auto& [key, value] : params) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorKind::InvalidConfig, "unknown parameter '" + key + "' for belief function " + std::string(fn));
    }
  }
}

std::unique_ptr<BeliefFunction> make_cosine(const std::map<std::string, double>& params) {
  reject_unknown(params, {"k1", "k2", "k3", "bare_k1", "bare_k2", "bare_k3"}, "cos");
  CosineWeights w;
  auto read = [&](const char* key, double& slot) {
    if (auto it = params.find(key); it != params.end()) slot = it->second;
    if (!(slot >= 0.0) || !std::isfinite(slot)) {
      throw Error(ErrorKind::InvalidConfig, std::string("cosine weight ") + key + " must be >= 0");
    }
  };
  read("k1", w.k1);
  read("k2", w.k2);
  read("k3", w.k3);
  read("bare_k1", w.bare_k1);
  read("bare_k2", w.bare_k2);
  read("bare_k3", w.bare_k3);
  return std::make_unique<CosineBelief>(w);
}

std::unique_ptr<BeliefFunction> make_correlation(const std::map<std::string, double>& params) {
  reject_unknown(params, {"unbiased"}, "cov");
  auto estimator = Estimator::Unbiased;
  if (auto it = params.find("unbiased"); it != params.end()) {
    if (it->second != 0.0 && it->second != 1.0) throw Error(ErrorKind::InvalidConfig, "unbiased must be 0 or 1");
    estimator = it->second == 1.0 ? Estimator::Unbiased : Estimator::Population;
  }
  return std::make_unique<CorrelationBelief>(estimator);
}

}  // namespace

BeliefRegistry::BeliefRegistry() {
  factories_.emplace("cos", make_cosine);
  factories_.emplace("cov", make_correlation);
}

BeliefRegistry& BeliefRegistry::instance() {
  static BeliefRegistry registry;
  return registry;
}

void BeliefRegistry::add(std::string name, Factory factory) {
  std::lock_guard lock(mutex_);
  factories_.insert_or_assign(std::move(name), std::move(factory));
}

bool BeliefRegistry::contains(std::string_view name) const {
  std::lock_guard lock(mutex_);
  return factories_.find(name) != factories_.end();
}

std::vector<std::string> BeliefRegistry::names() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [name, f] : factories_) out.push_back(name);
  return out;
}

std::unique_ptr<BeliefFunction> BeliefRegistry::make(const BeliefFunctionSpec& spec) const {
  Factory factory;
  {
    std::lock_guard lock(mutex_);
    auto it = factories_.find(spec.name);
    if (it == factories_.end()) throw Error(ErrorKind::UnknownBeliefFunction, spec.name);
    factory = it->second;
  }
  return factory(spec.parameters);
}

// ---------------------------------------------------------------------------
// System-level reduction and interestingness

std::string_view to_string(Branch branch) noexcept {
  return branch == Branch::Generalized ? "Generalized" : "Personalized";
}

double belief_to_system(std::span<const double> beliefs) {
  if (beliefs.empty()) throw Error(ErrorKind::EmptySystem, "no beliefs to reduce");
  return *std::max_element(beliefs.begin(), beliefs.end());
}

double deviation_to_system(std::span<const double> beliefs, DeviationForm form) {
  if (beliefs.empty()) throw Error(ErrorKind::EmptySystem, "no beliefs to reduce");
  const double n = static_cast<double>(beliefs.size());
  const double sum = std::accumulate(beliefs.begin(), beliefs.end(), 0.0);
  return form == DeviationForm::MeanMinusOne ? sum / n - 1.0 : (sum - 1.0) / n;
}

namespace {

std::vector<double> beliefs_against(const Rule& rule, const BeliefSystem& system, const BeliefFunction& fn) {
  ScoringContext ctx(system, system.database());
  std::vector<double> out(system.size());
  fn.beliefs(rule, ctx, out);
  return out;
}

}  // namespace

double belief_to_system(const Rule& rule, const BeliefSystem& system, const BeliefFunction& fn) {
  return belief_to_system(beliefs_against(rule, system, fn));
}

double deviation_to_system(const Rule& rule, const BeliefSystem& system, const BeliefFunction& fn,
                           DeviationForm form) {
  return deviation_to_system(beliefs_against(rule, system, fn), form);
}

Interestingness interestingness(double belief, double deviation) noexcept {
  if (belief >= std::abs(deviation)) return {belief, Branch::Generalized};
  return {deviation, Branch::Personalized};
}

std::vector<ScoredRule> score_ruleset(const RuleSet& rules, const BeliefSystem& system, const BeliefFunction& fn,
                                      const PreferenceDatabase& db, const ScoreOptions& options) {
  const ScoringContext ctx(system, db);
  std::vector<std::optional<ScoredRule>> slots(rules.size());
  parallel_chunks(rules.size(), options.jobs, [&](std::size_t begin, std::size_t end, std::size_t) {
    std::vector<double> beliefs(system.size());
    for (std::size_t i = begin; i < end; ++i) {
      const Rule& rule = rules[i];
      fn.beliefs(rule, ctx, beliefs);
      const std::size_t agree = ctx.agreement(rule).count();
      const std::size_t against = ctx.agreement(rule.inverse()).count();
      ScoredRule s{rule, 0.0, std::nullopt, 0.0, 0.0, 0.0, Branch::Generalized};
      s.support = db.empty() ? 0.0 : static_cast<double>(agree) / static_cast<double>(db.size());
      if (agree + against > 0) s.confidence = static_cast<double>(agree) / static_cast<double>(agree + against);
      s.belief = belief_to_system(beliefs);
      s.deviation = deviation_to_system(beliefs, options.deviation_form);
      const auto eta = interestingness(s.belief, s.deviation);
      s.eta = eta.eta;
      s.branch = eta.branch;
      slots[i] = std::move(s);
    }
  });
  std::vector<ScoredRule> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---------------------------------------------------------------------------
// Ranking

std::string_view to_string(RankKey key) noexcept {
  switch (key) {
    case RankKey::Eta: return "eta";
    case RankKey::Belief: return "belief";
    case RankKey::AbsDeviation: return "dev";
  }
  return "eta";
}

std::optional<RankKey> parse_rank_key(std::string_view text) noexcept {
  if (text == "eta") return RankKey::Eta;
  if (text == "belief") return RankKey::Belief;
  if (text == "dev" || text == "deviation") return RankKey::AbsDeviation;
  return std::nullopt;
}

std::vector<ScoredRule> rank_topk(std::span<const ScoredRule> scored, std::size_t k, RankKey key,
                                  const AttributeUniverse& universe) {
  auto value = [key](const ScoredRule& s) {
    switch (key) {
      case RankKey::Eta: return std::abs(s.eta);
      case RankKey::Belief: return s.belief;
      case RankKey::AbsDeviation: return std::abs(s.deviation);
    }
    return 0.0;
  };
  struct Entry {
    double value;
    double support;
    std::string text;
    std::size_t index;
  };
  std::vector<Entry> entries;
  entries.reserve(scored.size());
  for (std::size_t i = 0; i < scored.size(); ++i) {
    entries.push_back({value(scored[i]), scored[i].support, to_text(scored[i].rule, universe), i});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.support != b.support) return a.support > b.support;
    if (a.text != b.text) return a.text < b.text;
    return a.index < b.index;
  });
  const std::size_t n = std::min(k, entries.size());
  std::vector<ScoredRule> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(scored[entries[i].index]);
  return out;
}

}  // namespace cpref
