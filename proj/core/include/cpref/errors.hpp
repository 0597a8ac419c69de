#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cpref {

enum class ErrorKind {
  UnknownAttribute,
  InvalidRule,
  DanglingPair,
  MalformedRow,
  UnknownItem,
  UniverseMismatch,
  InvalidConfig,
  EmptyDatabase,
  DatabaseTooSmall,
  TooFewRules,
  EmptyRuleset,
  EmptySystem,
  ZeroNorm,
  UnknownBeliefFunction,
  MissingSplit,
  MissingArtifact,
  SchemaMismatch,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cpref
