#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace evocity {

enum class ErrorCode {
  NotARepository,
  UnreachableRemote,
  BranchNotFound,
  EmptyRepository,
  PathAbsent,
  InconsistentDelta,
  UnknownProject,
  UnknownArtifact,
  OrdinalOutOfRange,
  ProjectNotReady,
  InvalidArgument,
  Io,
  Internal,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (CLI exit codes, HTTP status mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace evocity
