#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cpref/model.hpp"

namespace cpref {

enum class UniversePolicy {
  // Every attribute named in the items source.
  AllItemAttributes,
  // Only attributes of items that were actually rated.
  RatedItemAttributes,
};

struct LoadOptions {
  UniversePolicy universe = UniversePolicy::AllItemAttributes;
};

struct LoadedRatings {
  std::shared_ptr<const AttributeUniverse> universe;
  // Grouped by user in order of first appearance; within a user, items in
  // order of first appearance. Transaction ids are "<user>:<item>".
  std::vector<Transaction> transactions;
};

// Reads MovieLens "::" records (user::item::rating::ts, item::title::A|B) or
// the CSV fallback (user,item,rating[,timestamp] and item,...,A|B, with an
// optional header line). The format is detected per stream. A repeated
// (user, item) rating keeps the latest timestamp, or the last row on ties.
// Items listed with "(no genres listed)" carry no attributes.
// Throws MalformedRow (with line number) and UnknownItem.
LoadedRatings load_transactions(std::istream& ratings, std::istream& items, const LoadOptions& options = {});
// Throws Io when a file cannot be opened.
LoadedRatings load_transaction_files(const std::filesystem::path& ratings, const std::filesystem::path& items,
                                     const LoadOptions& options = {});

struct IngestConfig {
  // Defaults suit 5-point ratings.
  double high_rating_threshold = 4.0;
  double min_gap = 0.5;
  std::optional<std::size_t> max_pairs_per_user;
  double split_ratio = 0.8;
  std::uint64_t seed = 0;

  // Throws InvalidConfig.
  void validate() const;
};

// t is preferred to u iff t is highly rated and beats u by more than the gap.
// Comparisons allow 1e-9 of slack so decimal ratings such as 8.6 - 7.6 behave.
bool qualifies(double t_rating, double u_rating, const IngestConfig& cfg) noexcept;

struct UserPreferenceSet {
  std::string user;
  // Holds all of the user's transactions and only the user's pairs.
  std::shared_ptr<const PreferenceDatabase> db;
};

// One set per user, users in input order. Pairs are emitted with t in outer and
// u in inner transaction order. Users above max_pairs_per_user keep a seeded
// uniform sample, still in that order.
std::vector<UserPreferenceSet> build_preferences(const LoadedRatings& loaded, const IngestConfig& cfg);

// Concatenates transactions and pairs; the universe must be shared.
// Throws UniverseMismatch.
PreferenceDatabase merge_users(std::span<const UserPreferenceSet> sets);
PreferenceDatabase merge_databases(std::span<const PreferenceDatabase* const> dbs);

struct TrainTest {
  PreferenceDatabase train;
  PreferenceDatabase test;
};

// ceil(r * n) pairs to train, the rest to test, both in original pair order.
// The choice depends on cfg.seed and the user id only.
TrainTest split(const UserPreferenceSet& set, const IngestConfig& cfg);

// Seeded helpers shared by the sampling paths.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept;
std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace cpref
