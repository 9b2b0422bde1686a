#include "evocity/error.hpp"

namespace evocity {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotARepository: return "NotARepository";
    case ErrorCode::UnreachableRemote: return "UnreachableRemote";
    case ErrorCode::BranchNotFound: return "BranchNotFound";
    case ErrorCode::EmptyRepository: return "EmptyRepository";
    case ErrorCode::PathAbsent: return "PathAbsent";
    case ErrorCode::InconsistentDelta: return "InconsistentDelta";
    case ErrorCode::UnknownProject: return "UnknownProject";
    case ErrorCode::UnknownArtifact: return "UnknownArtifact";
    case ErrorCode::OrdinalOutOfRange: return "OrdinalOutOfRange";
    case ErrorCode::ProjectNotReady: return "ProjectNotReady";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Internal: return "Internal";
  }
  return "Internal";
}

}  // namespace evocity
