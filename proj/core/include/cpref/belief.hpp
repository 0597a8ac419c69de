#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cpref/measures.hpp"
#include "cpref/model.hpp"

namespace cpref {

// Common belief: the aggregated consensus ruleset together with the consensus
// database it was mined from. Immutable once built.
class BeliefSystem {
 public:
  // Throws EmptySystem for an empty ruleset.
  BeliefSystem(RuleSet rules, std::shared_ptr<const PreferenceDatabase> db);

  const RuleSet& rules() const noexcept { return rules_; }
  std::size_t size() const noexcept { return rules_.size(); }
  const PreferenceDatabase& database() const noexcept { return *db_; }
  const std::shared_ptr<const PreferenceDatabase>& shared_database() const noexcept { return db_; }
  const Measures& measures() const noexcept { return *measures_; }

  double support(std::size_t i) const { return support_.at(i); }
  // popcount equals agree_count(rules()[i]) over database().
  const BitVector& agreement(std::size_t i) const { return *agreement_.at(i); }

 private:
  RuleSet rules_;
  std::shared_ptr<const PreferenceDatabase> db_;
  std::unique_ptr<Measures> measures_;
  std::vector<double> support_;
  std::vector<const BitVector*> agreement_;
};

// Everything a belief function may need while scoring rules against one
// system over one database: a pair index for `db` and the agreement bitmaps of
// the system's rules over `db` (shared with the system when db is its own).
class ScoringContext {
 public:
  ScoringContext(const BeliefSystem& system, const PreferenceDatabase& db);

  const BeliefSystem& system() const noexcept { return *system_; }
  const PreferenceDatabase& database() const noexcept { return *db_; }
  std::size_t pairs() const noexcept { return index_->size(); }

  BitVector agreement(const Rule& rule) const { return index_->agreement(rule); }
  const BitVector& system_agreement(std::size_t i) const { return *system_agreement_[i]; }
  std::size_t system_agree_count(std::size_t i) const { return system_counts_[i]; }

 private:
  const BeliefSystem* system_;
  const PreferenceDatabase* db_;
  std::unique_ptr<PairIndex> own_index_;
  const PairIndex* index_;
  std::vector<BitVector> own_agreement_;
  std::vector<const BitVector*> system_agreement_;
  std::vector<std::size_t> system_counts_;
};

// Rule-to-rule belief, pluggable by name through BeliefRegistry.
class BeliefFunction {
 public:
  virtual ~BeliefFunction() = default;

  virtual std::string_view name() const noexcept = 0;
  // belief(a -> b) over db.
  virtual double belief(const Rule& a, const Rule& b, const PreferenceDatabase& db) const = 0;
  // out[i] = belief(rule -> system rule i) over ctx.database().
  virtual void beliefs(const Rule& rule, const ScoringContext& ctx, std::span<double> out) const;
};

// Weighted cosine. The bare_* weights apply when both rules have an empty context.
struct CosineWeights {
  double k1 = 1.2;
  double k2 = 1.5;
  double k3 = 0.6;
  double bare_k1 = 1.5;
  double bare_k2 = 1.5;
  double bare_k3 = 0.0;

  static CosineWeights uniform(double k) { return {k, k, k, k, k, k}; }
};

// (k1 |a+ & b+| + k2 |a- & b-| + k3 |aX & bX|) / (sqrt|a| sqrt|b|) where |r| counts
// every bit of the rule. Structural only; no database involved. Throws ZeroNorm.
double cosine_belief(const Rule& a, const Rule& b, const CosineWeights& weights = {});

enum class Estimator { Population, Unbiased };

// |corr| of two agreement indicators from their counts over n pairs: a and b
// agreements, ab joint. 0 when either indicator is constant. Throws DatabaseTooSmall for n < 2.
double correlation_from_counts(std::size_t n, std::size_t a, std::size_t b, std::size_t ab,
                               Estimator estimator = Estimator::Unbiased);
double correlation_belief(const Rule& a, const Rule& b, const PreferenceDatabase& db);
double correlation_belief(const Rule& a, const Rule& b, const Measures& measures);

class CosineBelief final : public BeliefFunction {
 public:
  explicit CosineBelief(CosineWeights weights = {}) : weights_(weights) {}
  std::string_view name() const noexcept override { return "cos"; }
  double belief(const Rule& a, const Rule& b, const PreferenceDatabase& db) const override;
  const CosineWeights& weights() const noexcept { return weights_; }

 private:
  CosineWeights weights_;
};

class CorrelationBelief final : public BeliefFunction {
 public:
  explicit CorrelationBelief(Estimator estimator = Estimator::Unbiased) : estimator_(estimator) {}
  std::string_view name() const noexcept override { return "cov"; }
  double belief(const Rule& a, const Rule& b, const PreferenceDatabase& db) const override;
  void beliefs(const Rule& rule, const ScoringContext& ctx, std::span<double> out) const override;

 private:
  Estimator estimator_;
};

struct BeliefFunctionSpec {
  std::string name = "cov";
  std::map<std::string, double> parameters;
};

class BeliefRegistry {
 public:
  using Factory = std::function<std::unique_ptr<BeliefFunction>(const std::map<std::string, double>&)>;

  // Pre-populated with "cos" (parameters k1 k2 k3 bare_k1 bare_k2 bare_k3) and
  // "cov" (parameter unbiased: 0 or 1).
  static BeliefRegistry& instance();

  // A fresh registry holding only the two built-ins.
  BeliefRegistry();

  void add(std::string name, Factory factory);
  bool contains(std::string_view name) const;
  std::vector<std::string> names() const;
  // Throws UnknownBeliefFunction or InvalidConfig.
  std::unique_ptr<BeliefFunction> make(const BeliefFunctionSpec& spec) const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, Factory, std::less<>> factories_;
};

enum class DeviationForm {
  // mean(belief) - 1
  MeanMinusOne,
  // (sum(belief) - 1) / n, kept for comparison only
  SumMinusOneOverN,
};

enum class Branch { Generalized, Personalized };
std::string_view to_string(Branch branch) noexcept;

struct Interestingness {
  double eta = 0.0;
  Branch branch = Branch::Generalized;
};

// Reduce per-rule beliefs (one per system rule) to the system level. Throw EmptySystem on an empty span.
double belief_to_system(std::span<const double> beliefs);
double deviation_to_system(std::span<const double> beliefs, DeviationForm form = DeviationForm::MeanMinusOne);

// Against the system's own database.
double belief_to_system(const Rule& rule, const BeliefSystem& system, const BeliefFunction& fn);
double deviation_to_system(const Rule& rule, const BeliefSystem& system, const BeliefFunction& fn,
                           DeviationForm form = DeviationForm::MeanMinusOne);

// eta = belief when belief >= |deviation| (Generalized), else the signed deviation (Personalized).
Interestingness interestingness(double belief, double deviation) noexcept;

struct ScoredRule {
  Rule rule;
  double support = 0.0;
  std::optional<double> confidence;
  double belief = 0.0;
  double deviation = 0.0;
  double eta = 0.0;
  Branch branch = Branch::Generalized;
};

struct ScoreOptions {
  DeviationForm deviation_form = DeviationForm::MeanMinusOne;
  unsigned jobs = 1;
};

// One ScoredRule per input rule, in input order. Support, confidence and any
// database-driven belief are measured over `db`.
std::vector<ScoredRule> score_ruleset(const RuleSet& rules, const BeliefSystem& system, const BeliefFunction& fn,
                                      const PreferenceDatabase& db, const ScoreOptions& options = {});

enum class RankKey { Eta, Belief, AbsDeviation };

// Descending by |eta|, belief or |deviation|; ties by support (descending) and
// then canonical rule text. Returns the first min(k, n) entries.
std::vector<ScoredRule> rank_topk(std::span<const ScoredRule> scored, std::size_t k, RankKey key,
                                  const AttributeUniverse& universe);

std::string_view to_string(RankKey key) noexcept;
std::optional<RankKey> parse_rank_key(std::string_view text) noexcept;

}  // namespace cpref
