#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace skillcompass {

enum class ErrorCode {
  EmptySkill,
  MissingColumn,
  MalformedNumber,
  MalformedRow,
  EmptySkillList,
  NonPositiveWage,
  NegativeEarned,
  DuplicateWorker,
  InvariantViolation,
  UnknownSkill,
  UnknownDomain,
  EmptyGraph,
  BaselineNotFound,
  EmptyPopulation,
  RankDeficient,
  Underdetermined,
  SkillAlreadyHeld,
  InvalidConfig,
  InvalidArtifact,
  Io,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Carries the column names that made the design singular.
class RankDeficientError : public Error {
 public:
  RankDeficientError(std::vector<std::string> aliased, const std::string& what)
      : Error(ErrorCode::RankDeficient, what), aliased_(std::move(aliased)) {}
  const std::vector<std::string>& aliased() const noexcept { return aliased_; }

 private:
  std::vector<std::string> aliased_;
};

// Lists the worker ids whose profiles broke an invariant.
class InvariantViolationError : public Error {
 public:
  InvariantViolationError(std::vector<std::string> workers, const std::string& what)
      : Error(ErrorCode::InvariantViolation, what), workers_(std::move(workers)) {}
  const std::vector<std::string>& workers() const noexcept { return workers_; }

 private:
  std::vector<std::string> workers_;
};

}  // namespace skillcompass
