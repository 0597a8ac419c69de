#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <cpref/belief.hpp>
#include <cpref/eval.hpp>
#include <cpref/pra.hpp>
#include <cpref/snapshot.hpp>

namespace cpref::cli {

using UserScores = std::vector<std::pair<std::string, std::vector<ScoredRule>>>;

// user,rule,support,confidence,belief,deviation,eta,branch
void write_scored(std::ostream& out, const ArtifactHeader& header, const UserScores& scores,
                  const AttributeUniverse& universe);
// Users in file order.
UserScores read_scored(std::istream& in, const AttributeUniverse& universe);

// user,rank,rule,... with the first `top` rules of each user under `key`.
void write_ranked(std::ostream& out, const ArtifactHeader& header, const UserScores& scores, RankKey key,
                  std::size_t top, const AttributeUniverse& universe);

// key,K,metric,value
void write_eval(std::ostream& out, const ArtifactHeader& header, std::span<const TopKRow> rows);

void write_pra_trace(std::ostream& out, const std::string& config_digest, const PraTrace* trace,
                     std::size_t input_rules, std::size_t output_rules, const AttributeUniverse& universe);

}  // namespace cpref::cli
