#include <cstdlib>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpref_cli/config.hpp"
#include "cpref_cli/stages.hpp"

using namespace cpref;
using namespace cpref::cli;

namespace {

struct Common {
  std::string config_file;
  std::map<std::string, std::string> flags;
  std::vector<std::string> sets;
  bool quiet = false;
};

std::string flag_name(const std::string& key) {
  std::string out = key;
  for (auto& c : out) c = c == '_' ? '-' : c;
  return out;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-c,--config", c.config_file, "key = value config file");
  sub->add_option("--set", c.sets, "override a config key (key=value)");
  sub->add_flag("-q,--quiet", c.quiet, "no progress output");
  for (const auto& k : config_keys()) {
    std::string names = "--" + flag_name(k.name);
    if (k.name == "belief") names += ",--belief-fn";
    if (k.name == "rank_key") names += ",--key";
    if (k.name == "min_supp") names += ",--min-support";
    if (k.name == "min_conf") names += ",--min-confidence";
    if (k.name == "mine_on") names += ",--consensus-on";
    auto* opt = sub->add_option(names, c.flags[k.name], k.help);
    opt->default_str(k.default_value);
  }
}

RunConfig build(const Common& c, CLI::App* sub) {
  ConfigValues v;
  if (!c.config_file.empty()) v.apply_file(c.config_file);
  v.apply_env([](const char* name) { return std::getenv(name); });
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::InvalidConfig, "--set expects key=value, got '" + s + "'");
    v.set(s.substr(0, eq), s.substr(eq + 1));
  }
  for (const auto& k : config_keys()) {
    if (sub->count("--" + flag_name(k.name)) > 0) v.set(k.name, c.flags.at(k.name));
  }
  return resolve(v);
}

void report(std::string_view stage, const Error& e) {
  nlohmann::ordered_json j;
  j["stage"] = stage;
  j["kind"] = to_string(e.kind());
  j["message"] = e.what();
  std::cerr << "error: " << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cpref: contextual preference rule mining and interestingness scoring"};
  app.require_subcommand(1);
  app.set_version_flag("--version", CPREF_VERSION);

  Common common;
  std::map<Stage, CLI::App*> stage_cmds;
  const std::map<Stage, std::string> descriptions{
      {Stage::Ingest, "load ratings and items into transactions.csv"},
      {Stage::Prefs, "build per-user preference pairs and the train/test split (prefs.csv)"},
      {Stage::Mine, "mine consensus and per-user rules"},
      {Stage::Pra, "aggregate the consensus rules into the belief system"},
      {Stage::Rank, "score user rules against the belief system"},
      {Stage::Eval, "Top-K evaluation of the scored rules"},
  };
  std::string rules_file;
  for (auto s : pipeline_stages()) {
    auto* sub = app.add_subcommand(std::string(to_string(s)), descriptions.at(s));
    add_common(sub, common);
    if (s == Stage::Pra) sub->add_option("--rules", rules_file, "ruleset CSV to aggregate instead of consensus_rules.csv");
    stage_cmds[s] = sub;
  }
  auto* pipeline = app.add_subcommand("pipeline", "run every stage in order");
  add_common(pipeline, common);
  std::string positional_config;
  std::string from = "ingest";
  pipeline->add_option("config_file", positional_config, "config file (same as --config)");
  pipeline->add_option("--from", from, "first stage to run")->check(CLI::IsMember({"ingest", "prefs", "mine", "pra", "rank", "eval"}));

  auto* measures = app.add_subcommand("measures", "per-rule measures over the consensus database");
  auto* dump = measures->add_subcommand("dump", "write rule,agree,against,support,confidence to stdout");
  measures->require_subcommand(1);
  add_common(dump, common);
  std::string measure_rules;
  dump->add_option("--rules", measure_rules, "ruleset CSV (default: consensus_rules.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  set_quiet(common.quiet);
  std::string stage_name = "config";
  try {
    if (pipeline->parsed()) {
      if (common.config_file.empty()) common.config_file = positional_config;
      const auto cfg = build(common, pipeline);
      return run_pipeline(cfg, *parse_stage(from));
    }
    if (dump->parsed()) {
      stage_name = "measures";
      const auto cfg = build(common, dump);
      std::optional<std::filesystem::path> rules;
      if (!measure_rules.empty()) rules = measure_rules;
      dump_measures(cfg, rules, std::cout);
      return 0;
    }
    for (const auto& [stage, sub] : stage_cmds) {
      if (!sub->parsed()) continue;
      stage_name = "config";
      const auto cfg = build(common, sub);
      stage_name = std::string(to_string(stage));
      StageOptions opts;
      if (!rules_file.empty()) opts.rules = rules_file;
      for (const auto& f : run_stage(stage, cfg, opts)) std::cout << f.string() << '\n';
      return 0;
    }
  } catch (const Error& e) {
    report(stage_name, e);
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 6;
  }
  return 2;
}
