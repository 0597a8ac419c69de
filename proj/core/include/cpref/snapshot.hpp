#pragma once

#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cpref/ingest.hpp"
#include "cpref/model.hpp"

namespace cpref {

inline constexpr int kSchemaVersion = 1;

// Leading "# key: value" lines of every artifact file.
struct ArtifactHeader {
  std::string kind;
  int schema = kSchemaVersion;
  std::string config_digest;
  std::vector<std::pair<std::string, std::string>> extra;

  std::optional<std::string> get(std::string_view key) const;
};

struct ArtifactText {
  // nullopt when the file has no header block (a foreign CSV).
  std::optional<ArtifactHeader> header;
  std::vector<std::string> lines;
  // 1-based file line of lines[0].
  std::size_t first_line = 1;
};

void write_header(std::ostream& out, const ArtifactHeader& header);
// Blank lines are dropped. Throws SchemaMismatch when a header is present and
// its kind or schema differs from what the caller expects.
ArtifactText read_artifact(std::istream& in, std::string_view expected_kind);

// Transactions with their universe (ingest stage output).
void write_transactions(std::ostream& out, const ArtifactHeader& header, const LoadedRatings& loaded);
LoadedRatings read_transactions(std::istream& in);

struct UserSplitData {
  std::string user;
  std::shared_ptr<const PreferenceDatabase> train;
  std::shared_ptr<const PreferenceDatabase> test;
};

// Per-user preference databases after the train/test split.
struct PreferenceSnapshot {
  std::shared_ptr<const AttributeUniverse> universe;
  std::vector<UserSplitData> users;
};

void write_preferences(std::ostream& out, const ArtifactHeader& header, const PreferenceSnapshot& snapshot);
PreferenceSnapshot read_preferences(std::istream& in);

struct RuleRow {
  // Empty for rulesets that do not belong to one user.
  std::string user;
  Rule rule;
  double support = 0.0;
  std::optional<double> confidence;
};

// Columns [user,]i_plus,i_minus,context,support,confidence.
void write_rules(std::ostream& out, const ArtifactHeader& header, std::span<const RuleRow> rows,
                 const AttributeUniverse& universe, bool with_user);
// Columns are found by name; support and confidence are optional and other
// columns are ignored. Throws MalformedRow, UnknownAttribute, InvalidRule.
std::vector<RuleRow> read_rules(std::istream& in, const AttributeUniverse& universe);

}  // namespace cpref
