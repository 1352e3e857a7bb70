#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace beliefnest {

enum class ErrorCode {
  OutOfBounds,
  DuplicateAgentId,
  ContainerCellMismatch,
  UnknownAgent,
  ObserverMismatch,
  TimeRegression,
  ChildExists,
  DepthExceeded,
  NoSuchChild,
  InvalidPath,
  DuplicateBranchId,
  NoSuchBranch,
  TimeMismatch,
  NotControlMode,
  OutOfRange,
  InsufficientItems,
  NoSuchRecipe,
  Blocked,
  InvalidAction,
  ParseError,
  UnknownFilter,
  DuplicateFilter,
  UnresolvedBranch,
  UnboundVariable,
  NoKnownChests,
  NoInformation,
  ServiceUnreachable,
  MalformedPlan,
  SchemaError,
  QueryError,
};

std::string_view to_string(ErrorCode code);

// Every module reports failures through this one exception type; the code
// lets callers (the CLI in particular) map failures without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace beliefnest
