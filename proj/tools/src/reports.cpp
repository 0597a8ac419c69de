#include "cpref_cli/reports.hpp"

#include <json.hpp>

#include <cpref/csv.hpp>
#include <cpref/errors.hpp>

namespace cpref::cli {

namespace {

std::vector<std::string> score_fields(const ScoredRule& s, const AttributeUniverse& u) {
  return {to_text(s.rule, u),         csv::format_double(s.support), csv::format_optional(s.confidence),
          csv::format_double(s.belief), csv::format_double(s.deviation), csv::format_double(s.eta),
          std::string(to_string(s.branch))};
}

[[noreturn]] void bad_row(std::size_t line, const std::string& why) {
  throw Error(ErrorKind::MalformedRow, "line " + std::to_string(line) + ": " + why);
}

double number(const std::string& text, std::size_t line, const char* what) {
  auto v = csv::parse_double(text);
  if (!v) bad_row(line, std::string(what) + " is not a number");
  return *v;
}

nlohmann::ordered_json ratio_json(const Ratio& r) {
  return {{"num", r.num}, {"den", r.den}, {"value", r.value()}};
}

}  // namespace

void write_scored(std::ostream& out, const ArtifactHeader& header, const UserScores& scores,
                  const AttributeUniverse& universe) {
  write_header(out, header);
  out << "user,rule,support,confidence,belief,deviation,eta,branch\n";
  for (const auto& [user, rows] : scores) {
    for (const auto& s : rows) {
      auto f = score_fields(s, universe);
      f.insert(f.begin(), user);
      csv::write_row(out, f);
    }
  }
}

UserScores read_scored(std::istream& in, const AttributeUniverse& universe) {
  const auto text = read_artifact(in, "scored");
  UserScores out;
  for (std::size_t i = 0; i < text.lines.size(); ++i) {
    const std::size_t line = text.first_line + i;
    const auto f = csv::split(text.lines[i]);
    if (i == 0 && !f.empty() && f[0] == "user") continue;
    if (f.size() != 8) bad_row(line, "expected user,rule,support,confidence,belief,deviation,eta,branch");
    ScoredRule s{parse_rule(f[1], universe), number(f[2], line, "support"), std::nullopt,
                 number(f[4], line, "belief"), number(f[5], line, "deviation"), number(f[6], line, "eta"),
                 Branch::Generalized};
    if (f[3] != "NA") s.confidence = number(f[3], line, "confidence");
    if (f[7] == to_string(Branch::Personalized)) {
      s.branch = Branch::Personalized;
    } else if (f[7] != to_string(Branch::Generalized)) {
      bad_row(line, "unknown branch '" + f[7] + "'");
    }
    if (out.empty() || out.back().first != f[0]) out.emplace_back(f[0], std::vector<ScoredRule>{});
    out.back().second.push_back(std::move(s));
  }
  return out;
}

void write_ranked(std::ostream& out, const ArtifactHeader& header, const UserScores& scores, RankKey key,
                  std::size_t top, const AttributeUniverse& universe) {
  write_header(out, header);
  out << "user,rank,rule,support,confidence,belief,deviation,eta,branch\n";
  for (const auto& [user, rows] : scores) {
    const auto ranked = rank_topk(rows, top, key, universe);
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      auto f = score_fields(ranked[i], universe);
      f.insert(f.begin(), {user, std::to_string(i + 1)});
      csv::write_row(out, f);
    }
  }
}

void write_eval(std::ostream& out, const ArtifactHeader& header, std::span<const TopKRow> rows) {
  write_header(out, header);
  out << "key,K,metric,value\n";
  for (const auto& r : rows) {
    csv::write_row(out, {std::string(to_string(r.key)), std::to_string(r.k), r.metric, csv::format_optional(r.value)});
  }
}

void write_pra_trace(std::ostream& out, const std::string& config_digest, const PraTrace* trace,
                     std::size_t input_rules, std::size_t output_rules, const AttributeUniverse& universe) {
  nlohmann::ordered_json j;
  j["kind"] = "pra_trace";
  j["schema"] = kSchemaVersion;
  j["config"] = config_digest;
  j["input_rules"] = input_rules;
  j["output_rules"] = output_rules;
  if (!trace) {
    j["skipped"] = "fewer than two input rules; passed through unchanged";
  } else {
    j["mindis"] = trace->mindis;
    if (trace->seed_pair) {
      j["seed"] = {{"rules", {to_text(trace->seed_pair->first, universe), to_text(trace->seed_pair->second, universe)}},
                   {"avgdis", ratio_json(trace->seed_avgdis)}};
    } else {
      j["seed"] = nullptr;
    }
    auto steps = nlohmann::ordered_json::array();
    for (const auto& s : trace->additions) {
      steps.push_back({{"rule", to_text(s.rule, universe)}, {"avgdis", ratio_json(s.avgdis)}});
    }
    j["additions"] = std::move(steps);
    j["final_avgdis"] = trace->seed_pair ? ratio_json(trace->final_avgdis) : nlohmann::ordered_json(nullptr);
  }
  out << j.dump(2) << '\n';
}

}  // namespace cpref::cli
