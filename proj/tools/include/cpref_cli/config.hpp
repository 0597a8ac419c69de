#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <cpref/belief.hpp>
#include <cpref/eval.hpp>
#include <cpref/ingest.hpp>
#include <cpref/miner.hpp>
#include <cpref/pra.hpp>

namespace cpref::cli {

struct KeyInfo {
  std::string name;
  std::string default_value;
  std::string help;
  // Excluded from the config digest (paths, parallelism).
  bool operational = false;
};

// Every recognised config key, in documentation order.
const std::vector<KeyInfo>& config_keys();
bool is_config_key(std::string_view key);

// Raw key -> value text. Layers are applied in order: defaults, config file,
// CPREF_<KEY> environment variables, command-line flags.
class ConfigValues {
 public:
  ConfigValues();

  // Throws InvalidConfig for an unknown key.
  void set(const std::string& key, std::string value);
  const std::string& get(const std::string& key) const;
  bool is_explicit(const std::string& key) const { return explicit_.count(key) > 0; }
  const std::map<std::string, std::string>& all() const noexcept { return values_; }

  // "key = value" lines; '#' starts a comment. Throws Io or InvalidConfig.
  void apply_file(const std::filesystem::path& path);
  void apply_env(const std::function<const char*(const char*)>& getenv_fn);

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> explicit_;
};

std::string env_name(std::string_view key);

struct RunConfig {
  ConfigValues values;
  std::string digest;

  std::filesystem::path ratings;
  std::filesystem::path items;
  std::filesystem::path out;

  LoadOptions load;
  IngestConfig ingest;
  bool seed_given = false;

  MinerConfig user_miner;
  MinerConfig consensus_miner;
  // Mine (and score) over train+test instead of the train split only.
  bool mine_on_all = false;

  PraConfig pra;

  bool use_cos = true;
  bool use_cov = true;
  CosineWeights weights;
  Estimator estimator = Estimator::Unbiased;
  // Correlation over the consensus database instead of each user's own.
  bool cov_on_consensus = false;
  ScoreOptions score;

  RankKey rank_key = RankKey::Eta;
  std::size_t top = 10;

  TopKOptions topk;
  unsigned jobs = 1;

  std::vector<std::string> belief_names() const;
};

// Parses and validates every key. Throws InvalidConfig.
RunConfig resolve(const ConfigValues& values);

// fnv1a64 over the sorted non-operational key=value lines, as 16 hex digits.
std::string config_digest(const ConfigValues& values);

}  // namespace cpref::cli
