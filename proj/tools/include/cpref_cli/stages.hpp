#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include <cpref/errors.hpp>

#include "cpref_cli/config.hpp"

namespace cpref::cli {

enum class Stage { Ingest, Prefs, Mine, Pra, Rank, Eval };

std::string_view to_string(Stage stage) noexcept;
std::optional<Stage> parse_stage(std::string_view name) noexcept;
const std::vector<Stage>& pipeline_stages();

namespace files {
inline constexpr const char* transactions = "transactions.csv";
inline constexpr const char* prefs = "prefs.csv";
inline constexpr const char* consensus_rules = "consensus_rules.csv";
inline constexpr const char* user_rules = "user_rules.csv";
inline constexpr const char* belief_rules = "belief_rules.csv";
inline constexpr const char* pra_trace = "pra_trace.json";
inline constexpr const char* manifest = "manifest.json";
}  // namespace files

struct StageOptions {
  // pra: read this ruleset instead of consensus_rules.csv.
  std::optional<std::filesystem::path> rules;
};

// Runs one stage against the artifacts in cfg.out and returns the files it
// wrote. Throws MissingArtifact when an upstream artifact is absent.
std::vector<std::filesystem::path> run_stage(Stage stage, const RunConfig& cfg, const StageOptions& options = {});

// Runs the stages from `from` to the end. On success writes manifest.json;
// on failure removes what this run wrote and leaves only a failure manifest.
// Returns the process exit code.
int run_pipeline(const RunConfig& cfg, Stage from = Stage::Ingest);

// rule,agree,against,support,confidence for every rule of `rules` (default:
// consensus_rules.csv) over the consensus database.
void dump_measures(const RunConfig& cfg, const std::optional<std::filesystem::path>& rules, std::ostream& out);

// 2 usage/config, 3 ingest, 4 missing artifact, 5 schema mismatch, 6 anything else.
int exit_code(ErrorKind kind) noexcept;

void set_quiet(bool quiet) noexcept;

}  // namespace cpref::cli
