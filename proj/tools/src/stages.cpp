#include "cpref_cli/stages.hpp"

#include <atomic>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include <cpref/csv.hpp>
#include <cpref/ingest.hpp>
#include <cpref/measures.hpp>
#include <cpref/parallel.hpp>
#include <cpref/snapshot.hpp>

#include "cpref_cli/reports.hpp"

#ifndef CPREF_VERSION
#define CPREF_VERSION "0.0.0"
#endif

namespace cpref::cli {

namespace fs = std::filesystem;

namespace {

std::atomic<bool> g_quiet{false};

void log(Stage stage, const std::string& msg) {
  if (!g_quiet) std::cerr << "[cpref " << to_string(stage) << "] " << msg << '\n';
}

ArtifactHeader header(const RunConfig& cfg, std::string kind) {
  ArtifactHeader h;
  h.kind = std::move(kind);
  h.config_digest = cfg.digest;
  return h;
}

std::ifstream open_artifact(const RunConfig& cfg, const std::string& name, Stage producer) {
  const auto path = cfg.out / name;
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::MissingArtifact,
                path.string() + " not found (produced by the " + std::string(to_string(producer)) + " stage)");
  }
  return in;
}

// Writes through a string buffer so a failed stage never leaves half a file.
class ArtifactWriter {
 public:
  ArtifactWriter(const RunConfig& cfg, std::string name) : path_(cfg.out / name) {}
  std::ostream& stream() { return buf_; }
  fs::path commit() {
    fs::create_directories(path_.parent_path());
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    out << buf_.str();
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path_.string());
    return path_;
  }

 private:
  fs::path path_;
  std::ostringstream buf_;
};

std::shared_ptr<const PreferenceDatabase> mining_db(const UserSplitData& u, bool all) {
  if (!all) return u.train;
  std::vector<PreferencePair> pairs(u.train->pairs().begin(), u.train->pairs().end());
  pairs.insert(pairs.end(), u.test->pairs().begin(), u.test->pairs().end());
  return std::make_shared<const PreferenceDatabase>(u.train->with_pairs(std::move(pairs)));
}

struct Loaded {
  PreferenceSnapshot snap;
  std::vector<std::shared_ptr<const PreferenceDatabase>> user_dbs;
  std::shared_ptr<const PreferenceDatabase> consensus;
};

Loaded load_prefs(const RunConfig& cfg) {
  auto in = open_artifact(cfg, files::prefs, Stage::Prefs);
  Loaded l;
  l.snap = read_preferences(in);
  std::vector<const PreferenceDatabase*> ptrs;
  for (const auto& u : l.snap.users) {
    l.user_dbs.push_back(mining_db(u, cfg.mine_on_all));
    ptrs.push_back(l.user_dbs.back().get());
  }
  auto merged = ptrs.empty() ? PreferenceDatabase(l.snap.universe, {}, {}) : merge_databases(ptrs);
  l.consensus = std::make_shared<const PreferenceDatabase>(std::move(merged));
  return l;
}

std::vector<RuleRow> read_rule_file(std::istream& in, const AttributeUniverse& u) { return read_rules(in, u); }

std::vector<RuleRow> rows_for(const RuleSet& rules, const Measures& m, const std::string& user) {
  std::vector<RuleRow> rows;
  rows.reserve(rules.size());
  for (const auto& r : rules) {
    const auto rec = m.record(r);
    rows.push_back({user, r, rec.support, rec.confidence});
  }
  return rows;
}

// ---------------------------------------------------------------------------

std::vector<fs::path> stage_ingest(const RunConfig& cfg) {
  if (cfg.ratings.empty() || cfg.items.empty()) {
    throw Error(ErrorKind::InvalidConfig, "ingest needs both ratings and items paths");
  }
  auto loaded = load_transaction_files(cfg.ratings, cfg.items, cfg.load);
  log(Stage::Ingest, std::to_string(loaded.transactions.size()) + " rated transactions over " +
                         std::to_string(loaded.universe->size()) + " attributes");
  ArtifactWriter w(cfg, files::transactions);
  write_transactions(w.stream(), header(cfg, "transactions"), loaded);
  return {w.commit()};
}

std::vector<fs::path> stage_prefs(const RunConfig& cfg) {
  if (!cfg.seed_given) throw Error(ErrorKind::InvalidConfig, "prefs samples pairs; --seed is required");
  auto in = open_artifact(cfg, files::transactions, Stage::Ingest);
  const auto loaded = read_transactions(in);
  const auto sets = build_preferences(loaded, cfg.ingest);
  PreferenceSnapshot snap{loaded.universe, {}};
  std::size_t train = 0, test = 0;
  for (const auto& s : sets) {
    auto tt = split(s, cfg.ingest);
    train += tt.train.size();
    test += tt.test.size();
    snap.users.push_back({s.user, std::make_shared<const PreferenceDatabase>(std::move(tt.train)),
                          std::make_shared<const PreferenceDatabase>(std::move(tt.test))});
  }
  log(Stage::Prefs, std::to_string(sets.size()) + " users, " + std::to_string(train) + " train / " +
                        std::to_string(test) + " test pairs");
  ArtifactWriter w(cfg, files::prefs);
  write_preferences(w.stream(), header(cfg, "preferences"), snap);
  return {w.commit()};
}

std::vector<fs::path> stage_mine(const RunConfig& cfg) {
  const auto l = load_prefs(cfg);
  const auto& u = *l.snap.universe;
  if (cfg.consensus_miner.min_support < cfg.user_miner.min_support) {
    log(Stage::Mine, "warning: consensus min_supp is below the per-user min_supp");
  }
  const auto consensus = mine_consensus(*l.consensus, cfg.consensus_miner);
  const Measures cm(*l.consensus);
  log(Stage::Mine, std::to_string(consensus.size()) + " consensus rules over " + std::to_string(l.consensus->size()) +
                       " pairs");

  std::vector<RuleSet> per_user(l.snap.users.size());
  parallel_for(per_user.size(), cfg.jobs, [&](std::size_t i) {
    if (!l.user_dbs[i]->empty()) per_user[i] = enumerate_rules(*l.user_dbs[i], cfg.user_miner);
  });
  std::vector<RuleRow> user_rows;
  std::size_t total = 0;
  for (std::size_t i = 0; i < per_user.size(); ++i) {
    if (per_user[i].empty()) continue;
    const Measures m(*l.user_dbs[i]);
    auto rows = rows_for(per_user[i], m, l.snap.users[i].user);
    total += rows.size();
    user_rows.insert(user_rows.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
  }
  log(Stage::Mine, std::to_string(total) + " user rules");

  ArtifactWriter wc(cfg, files::consensus_rules);
  write_rules(wc.stream(), header(cfg, "rules"), rows_for(consensus, cm, ""), u, false);
  ArtifactWriter wu(cfg, files::user_rules);
  write_rules(wu.stream(), header(cfg, "rules"), user_rows, u, true);
  return {wc.commit(), wu.commit()};
}

std::vector<fs::path> stage_pra(const RunConfig& cfg, const StageOptions& opts) {
  const auto l = load_prefs(cfg);
  const auto& u = *l.snap.universe;
  std::vector<RuleRow> input;
  if (opts.rules) {
    std::ifstream in(*opts.rules);
    if (!in) throw Error(ErrorKind::MissingArtifact, opts.rules->string() + " not found");
    input = read_rule_file(in, u);
  } else {
    auto in = open_artifact(cfg, files::consensus_rules, Stage::Mine);
    input = read_rule_file(in, u);
  }
  std::vector<Rule> rules;
  for (auto& r : input) rules.push_back(std::move(r.rule));
  const auto set = RuleSet::in_order(std::move(rules));
  const Measures m(*l.consensus);

  RuleSet kept;
  std::optional<PraResult> res;
  if (set.size() < 2) {
    log(Stage::Pra, "fewer than two rules; passing the ruleset through");
    kept = set;
  } else {
    res = pra_aggregate(set, m, cfg.pra);
    kept = res->rules;
    log(Stage::Pra, "mindis " + csv::format_double(res->trace.mindis) + ": kept " + std::to_string(kept.size()) +
                        " of " + std::to_string(set.size()) + " rules");
  }
  ArtifactWriter wr(cfg, files::belief_rules);
  write_rules(wr.stream(), header(cfg, "rules"), rows_for(kept, m, ""), u, false);
  ArtifactWriter wt(cfg, files::pra_trace);
  write_pra_trace(wt.stream(), cfg.digest, res ? &res->trace : nullptr, set.size(), kept.size(), u);
  return {wr.commit(), wt.commit()};
}

std::unique_ptr<BeliefFunction> make_belief(const RunConfig& cfg, const std::string& name) {
  BeliefFunctionSpec spec;
  spec.name = name;
  if (name == "cos") {
    const auto& w = cfg.weights;
    spec.parameters = {{"k1", w.k1},           {"k2", w.k2},           {"k3", w.k3},
                       {"bare_k1", w.bare_k1}, {"bare_k2", w.bare_k2}, {"bare_k3", w.bare_k3}};
  } else {
    spec.parameters = {{"unbiased", cfg.estimator == Estimator::Unbiased ? 1.0 : 0.0}};
  }
  return BeliefRegistry::instance().make(spec);
}

std::vector<fs::path> stage_rank(const RunConfig& cfg) {
  const auto l = load_prefs(cfg);
  const auto& u = *l.snap.universe;
  std::vector<Rule> sys;
  {
    auto in = open_artifact(cfg, files::belief_rules, Stage::Pra);
    for (auto& r : read_rule_file(in, u)) sys.push_back(std::move(r.rule));
  }
  const BeliefSystem system(RuleSet::in_order(std::move(sys)), l.consensus);

  std::map<std::string, std::vector<Rule>> by_user;
  {
    auto in = open_artifact(cfg, files::user_rules, Stage::Mine);
    for (auto& r : read_rule_file(in, u)) by_user[r.user].push_back(std::move(r.rule));
  }

  std::vector<fs::path> written;
  for (const auto& name : cfg.belief_names()) {
    const auto fn = make_belief(cfg, name);
    UserScores scores;
    for (std::size_t i = 0; i < l.snap.users.size(); ++i) {
      auto it = by_user.find(l.snap.users[i].user);
      if (it == by_user.end()) continue;
      const auto& db = cfg.cov_on_consensus ? *l.consensus : *l.user_dbs[i];
      scores.emplace_back(it->first, score_ruleset(RuleSet::in_order(it->second), system, *fn, db, cfg.score));
    }
    std::size_t n = 0;
    for (const auto& s : scores) n += s.second.size();
    log(Stage::Rank, name + ": scored " + std::to_string(n) + " rules of " + std::to_string(scores.size()) +
                         " users against " + std::to_string(system.size()) + " belief rules");
    ArtifactWriter ws(cfg, "scored_" + name + ".csv");
    auto h = header(cfg, "scored");
    h.extra.emplace_back("belief", name);
    write_scored(ws.stream(), h, scores, u);
    written.push_back(ws.commit());
    if (cfg.top > 0) {
      ArtifactWriter wk(cfg, "ranked_" + name + ".csv");
      auto hk = header(cfg, "ranked");
      hk.extra.emplace_back("belief", name);
      hk.extra.emplace_back("key", std::string(to_string(cfg.rank_key)));
      write_ranked(wk.stream(), hk, scores, cfg.rank_key, cfg.top, u);
      written.push_back(wk.commit());
    }
  }
  return written;
}

std::vector<fs::path> stage_eval(const RunConfig& cfg) {
  const auto l = load_prefs(cfg);
  const auto& u = *l.snap.universe;
  std::map<std::string, UserSplit> splits;
  for (const auto& s : l.snap.users) splits[s.user] = {s.train, s.test};

  std::vector<fs::path> written;
  for (const auto& name : cfg.belief_names()) {
    UserScores scores;
    {
      auto in = open_artifact(cfg, "scored_" + name + ".csv", Stage::Rank);
      scores = read_scored(in, u);
    }
    std::map<std::string, std::vector<ScoredRule>> per_user(scores.begin(), scores.end());
    const auto rows = topk_experiment(per_user, splits, u, cfg.topk);
    log(Stage::Eval, name + ": " + std::to_string(rows.size()) + " rows over " + std::to_string(per_user.size()) +
                         " users");
    ArtifactWriter w(cfg, "eval_" + name + ".csv");
    auto h = header(cfg, "eval");
    h.extra.emplace_back("belief", name);
    write_eval(w.stream(), h, rows);
    written.push_back(w.commit());
  }
  return written;
}

std::string file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
}

}  // namespace

std::string_view to_string(Stage stage) noexcept {
  switch (stage) {
    case Stage::Ingest: return "ingest";
    case Stage::Prefs: return "prefs";
    case Stage::Mine: return "mine";
    case Stage::Pra: return "pra";
    case Stage::Rank: return "rank";
    case Stage::Eval: return "eval";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view name) noexcept {
  for (auto s : pipeline_stages()) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

const std::vector<Stage>& pipeline_stages() {
  static const std::vector<Stage> all{Stage::Ingest, Stage::Prefs, Stage::Mine, Stage::Pra, Stage::Rank, Stage::Eval};
  return all;
}

void set_quiet(bool quiet) noexcept { g_quiet = quiet; }

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidConfig: return 2;
    case ErrorKind::Io:
    case ErrorKind::MalformedRow:
    case ErrorKind::UnknownItem: return 3;
    case ErrorKind::MissingArtifact: return 4;
    case ErrorKind::SchemaMismatch: return 5;
    default: return 6;
  }
}

std::vector<fs::path> run_stage(Stage stage, const RunConfig& cfg, const StageOptions& options) {
  switch (stage) {
    case Stage::Ingest: return stage_ingest(cfg);
    case Stage::Prefs: return stage_prefs(cfg);
    case Stage::Mine: return stage_mine(cfg);
    case Stage::Pra: return stage_pra(cfg, options);
    case Stage::Rank: return stage_rank(cfg);
    case Stage::Eval: return stage_eval(cfg);
  }
  return {};
}

int run_pipeline(const RunConfig& cfg, Stage from) {
  std::vector<fs::path> written;
  Stage current = from;
  try {
    bool started = false;
    for (auto s : pipeline_stages()) {
      started = started || s == from;
      if (!started) continue;
      current = s;
      auto files = run_stage(s, cfg);
      written.insert(written.end(), files.begin(), files.end());
    }
  } catch (const Error& e) {
    for (const auto& f : written) {
      std::error_code ec;
      fs::remove(f, ec);
    }
    const int code = exit_code(e.kind());
    nlohmann::ordered_json j;
    j["tool"] = "cpref";
    j["version"] = CPREF_VERSION;
    j["schema"] = kSchemaVersion;
    j["status"] = "error";
    j["stage"] = to_string(current);
    j["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
    j["exit_code"] = code;
    try {
      write_json(cfg.out / files::manifest, j);
    } catch (const Error&) {
    }
    std::cerr << "[cpref " << to_string(current) << "] error: " << e.what() << '\n';
    return code;
  }

  nlohmann::ordered_json j;
  j["tool"] = "cpref";
  j["version"] = CPREF_VERSION;
  j["schema"] = kSchemaVersion;
  j["status"] = "ok";
  j["from"] = to_string(from);
  j["config_digest"] = cfg.digest;
  auto config = nlohmann::ordered_json::object();
  for (const auto& [k, v] : cfg.values.all()) {
    if (k != "out") config[k] = v;
  }
  j["config"] = std::move(config);
  if (from == Stage::Ingest) {
    j["inputs"] = {{"ratings", {{"path", cfg.ratings.string()}, {"fnv1a64", file_digest(cfg.ratings)}}},
                   {"items", {{"path", cfg.items.string()}, {"fnv1a64", file_digest(cfg.items)}}}};
  }
  auto artifacts = nlohmann::ordered_json::array();
  for (const auto& f : written) artifacts.push_back({{"file", f.filename().string()}, {"fnv1a64", file_digest(f)}});
  j["artifacts"] = std::move(artifacts);
  write_json(cfg.out / files::manifest, j);
  return 0;
}

void dump_measures(const RunConfig& cfg, const std::optional<fs::path>& rules, std::ostream& out) {
  const auto l = load_prefs(cfg);
  const auto& u = *l.snap.universe;
  std::vector<RuleRow> rows;
  if (rules) {
    std::ifstream in(*rules);
    if (!in) throw Error(ErrorKind::MissingArtifact, rules->string() + " not found");
    rows = read_rule_file(in, u);
  } else {
    auto in = open_artifact(cfg, files::consensus_rules, Stage::Mine);
    rows = read_rule_file(in, u);
  }
  const Measures m(*l.consensus);
  out << "rule,agree,against,support,confidence\n";
  for (const auto& r : rows) {
    const auto rec = m.record(r.rule);
    csv::write_row(out, {to_text(r.rule, u), std::to_string(rec.agree), std::to_string(rec.against),
                         csv::format_double(rec.support), csv::format_optional(rec.confidence)});
  }
}

}  // namespace cpref::cli
