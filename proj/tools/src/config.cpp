#include "cpref_cli/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>

#include <cpref/csv.hpp>
#include <cpref/errors.hpp>

namespace cpref::cli {

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw Error(ErrorKind::InvalidConfig, key + ": " + why);
}

double as_double(const ConfigValues& v, const std::string& key) {
  auto d = csv::parse_double(v.get(key));
  if (!d) bad(key, "'" + v.get(key) + "' is not a number");
  return *d;
}

std::size_t as_count(const ConfigValues& v, const std::string& key) {
  auto i = csv::parse_int(v.get(key));
  if (!i || *i < 0) bad(key, "'" + v.get(key) + "' is not a non-negative integer");
  return static_cast<std::size_t>(*i);
}

bool as_bool(const ConfigValues& v, const std::string& key) {
  const auto& s = v.get(key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  bad(key, "'" + s + "' is not a boolean");
}

std::vector<std::string> as_list(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& f : csv::split(text)) {
    auto t = csv::trim(f);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

std::string choice(const ConfigValues& v, const std::string& key, std::initializer_list<std::string_view> allowed) {
  const auto& s = v.get(key);
  for (auto a : allowed) {
    if (s == a) return s;
  }
  std::string msg = "'" + s + "' is not one of";
  for (auto a : allowed) msg += " " + std::string(a);
  bad(key, msg);
}

}  // namespace

const std::vector<KeyInfo>& config_keys() {
  static const std::vector<KeyInfo> keys{
      {"ratings", "", "ratings file (MovieLens :: or CSV)", true},
      {"items", "", "items file with '|'-separated attributes", true},
      {"out", "cpref-out", "artifact directory", true},
      {"universe", "all", "attribute universe: all | rated", false},
      {"high", "4", "minimum rating of a preferred item", false},
      {"gap", "0.5", "rating margin a preferred item must exceed", false},
      {"max_pairs", "none", "per-user pair cap (seeded sample), or none", false},
      {"split", "0.8", "train fraction of each user's pairs", false},
      {"seed", "", "seed for every sampling step (required by prefs)", false},
      {"min_supp", "0.005", "per-user minimum support", false},
      {"min_conf", "0.7", "per-user minimum confidence", false},
      {"max_ctx", "2", "maximum context size", false},
      {"max_side", "1", "maximum size of the preferred and dominated itemsets", false},
      {"consensus_min_supp", "0.01", "consensus minimum support", false},
      {"consensus_min_conf", "0.7", "consensus minimum confidence", false},
      {"mine_on", "train", "pairs used for mining and scoring: train | all", false},
      {"mindis", "auto", "PRA threshold, a number or auto", false},
      {"belief", "both", "belief functions to run: cos | cov | both", false},
      {"k1", "1.2", "cosine weight on the preferred itemsets", false},
      {"k2", "1.5", "cosine weight on the dominated itemsets", false},
      {"k3", "0.6", "cosine weight on the contexts", false},
      {"bare_k1", "1.5", "k1 when both contexts are empty", false},
      {"bare_k2", "1.5", "k2 when both contexts are empty", false},
      {"bare_k3", "0", "k3 when both contexts are empty", false},
      {"estimator", "unbiased", "correlation estimator: unbiased | population", false},
      {"cov_on", "user", "database for correlation beliefs: user | consensus", false},
      {"deviation", "mean", "deviation form: mean | compat", false},
      {"rank_key", "eta", "ranking key for ranked output: eta | belief | dev", false},
      {"top", "10", "rules per user in ranked output (0 = skip)", false},
      {"ks", "5,10,15,20,25,30,35,40,45,50", "Top-K sizes for eval", false},
      {"keys", "eta,belief,dev,raw", "sort keys compared by eval", false},
      {"standard_f1", "false", "also report 2PR/(P+R)", false},
      {"jobs", "1", "worker threads (0 = all cores)", true},
  };
  return keys;
}

bool is_config_key(std::string_view key) {
  for (const auto& k : config_keys()) {
    if (k.name == key) return true;
  }
  return false;
}

std::string env_name(std::string_view key) {
  std::string out = "CPREF_";
  for (char c : key) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

ConfigValues::ConfigValues() {
  for (const auto& k : config_keys()) values_[k.name] = k.default_value;
}

void ConfigValues::set(const std::string& key, std::string value) {
  if (!is_config_key(key)) throw Error(ErrorKind::InvalidConfig, "unknown config key '" + key + "'");
  values_[key] = std::move(value);
  explicit_.insert(key);
}

const std::string& ConfigValues::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorKind::InvalidConfig, "unknown config key '" + key + "'");
  return it->second;
}

void ConfigValues::apply_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = csv::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::InvalidConfig, path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(csv::trim(body.substr(0, eq)));
    for (auto& c : key) c = c == '-' ? '_' : c;
    set(key, std::string(csv::trim(body.substr(eq + 1))));
  }
}

void ConfigValues::apply_env(const std::function<const char*(const char*)>& getenv_fn) {
  for (const auto& k : config_keys()) {
    if (const char* v = getenv_fn(env_name(k.name).c_str())) set(k.name, v);
  }
}

std::string config_digest(const ConfigValues& values) {
  std::string text;
  for (const auto& k : config_keys()) {
    if (k.operational) continue;
    text += k.name + "=" + values.get(k.name) + "\n";
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
  return buf;
}

std::vector<std::string> RunConfig::belief_names() const {
  std::vector<std::string> out;
  if (use_cos) out.emplace_back("cos");
  if (use_cov) out.emplace_back("cov");
  return out;
}

RunConfig resolve(const ConfigValues& v) {
  RunConfig c;
  c.values = v;
  c.digest = config_digest(v);
  c.ratings = v.get("ratings");
  c.items = v.get("items");
  c.out = v.get("out");
  if (c.out.empty()) bad("out", "must not be empty");

  c.load.universe = choice(v, "universe", {"all", "rated"}) == "all" ? UniversePolicy::AllItemAttributes
                                                                      : UniversePolicy::RatedItemAttributes;
  c.ingest.high_rating_threshold = as_double(v, "high");
  c.ingest.min_gap = as_double(v, "gap");
  if (v.get("max_pairs") != "none") c.ingest.max_pairs_per_user = as_count(v, "max_pairs");
  c.ingest.split_ratio = as_double(v, "split");
  if (!v.get("seed").empty()) {
    auto s = csv::parse_int(v.get("seed"));
    if (!s || *s < 0) bad("seed", "'" + v.get("seed") + "' is not a non-negative integer");
    c.ingest.seed = static_cast<std::uint64_t>(*s);
    c.seed_given = true;
  }
  c.ingest.validate();

  c.jobs = static_cast<unsigned>(as_count(v, "jobs"));
  c.user_miner.min_support = as_double(v, "min_supp");
  c.user_miner.min_confidence = as_double(v, "min_conf");
  c.user_miner.max_context_len = as_count(v, "max_ctx");
  c.user_miner.max_side_len = as_count(v, "max_side");
  c.user_miner.jobs = 1;
  c.consensus_miner = c.user_miner;
  c.consensus_miner.min_support = as_double(v, "consensus_min_supp");
  c.consensus_miner.min_confidence = as_double(v, "consensus_min_conf");
  c.consensus_miner.jobs = c.jobs;
  c.user_miner.validate();
  c.consensus_miner.validate();
  c.mine_on_all = choice(v, "mine_on", {"train", "all"}) == "all";

  if (v.get("mindis") != "auto") {
    c.pra.mindis = as_double(v, "mindis");
    if (*c.pra.mindis < 0) bad("mindis", "must be >= 0");
  }
  c.pra.jobs = c.jobs;

  const auto belief = choice(v, "belief", {"cos", "cov", "both"});
  c.use_cos = belief != "cov";
  c.use_cov = belief != "cos";
  c.weights = {as_double(v, "k1"),      as_double(v, "k2"),      as_double(v, "k3"),
               as_double(v, "bare_k1"), as_double(v, "bare_k2"), as_double(v, "bare_k3")};
  c.estimator = choice(v, "estimator", {"unbiased", "population"}) == "unbiased" ? Estimator::Unbiased
                                                                                 : Estimator::Population;
  c.cov_on_consensus = choice(v, "cov_on", {"user", "consensus"}) == "consensus";
  c.score.deviation_form = choice(v, "deviation", {"mean", "compat"}) == "mean" ? DeviationForm::MeanMinusOne
                                                                                : DeviationForm::SumMinusOneOverN;
  c.score.jobs = c.jobs;

  auto key = parse_rank_key(v.get("rank_key"));
  if (!key) bad("rank_key", "'" + v.get("rank_key") + "' is not one of eta belief dev");
  c.rank_key = *key;
  c.top = as_count(v, "top");

  c.topk.ks.clear();
  for (const auto& k : as_list(v.get("ks"))) {
    auto n = csv::parse_int(k);
    if (!n || *n <= 0) bad("ks", "'" + k + "' is not a positive integer");
    c.topk.ks.push_back(static_cast<std::size_t>(*n));
  }
  if (c.topk.ks.empty()) bad("ks", "needs at least one K");
  c.topk.keys.clear();
  for (const auto& k : as_list(v.get("keys"))) {
    if (k == "eta") {
      c.topk.keys.push_back(TopKKey::Eta);
    } else if (k == "belief") {
      c.topk.keys.push_back(TopKKey::Belief);
    } else if (k == "dev" || k == "deviation") {
      c.topk.keys.push_back(TopKKey::AbsDeviation);
    } else if (k == "raw") {
      c.topk.keys.push_back(TopKKey::Raw);
    } else {
      bad("keys", "'" + k + "' is not one of eta belief dev raw");
    }
  }
  if (c.topk.keys.empty()) bad("keys", "needs at least one key");
  c.topk.standard_f1 = as_bool(v, "standard_f1");
  c.topk.jobs = c.jobs;
  return c;
}

}  // namespace cpref::cli
