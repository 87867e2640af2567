// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace herocluster {

enum class ErrorCode {
  // input files and documents
  FileUnreadable,
  MalformedDocument,
  UnknownHeroReference,
  InvalidAliasMap,
  ConflictingProperty,
  MissingHeroRecord,
  SchemaMismatch,
  // clustering
  TooFewRows,
  NonFiniteInput,
  DimensionMismatch,
  SingleCluster,
  EmptyLabelSet,
  InvalidArgument,
  // encoding
  LabelOutOfRange,
  MixedDimensions,
  WrongTeamSize,
  IdOutOfRange,
  UnknownCharacter,
  // match data
  NetworkError,
  RateLimited,
  MalformedResponse,
  EmptyDataset,
  InvalidConfig,
  // model / evaluation
  NonFiniteLoss,
  DegenerateLabels,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileUnreadable: return "FileUnreadable";
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::UnknownHeroReference: return "UnknownHeroReference";
    case ErrorCode::InvalidAliasMap: return "InvalidAliasMap";
    case ErrorCode::ConflictingProperty: return "ConflictingProperty";
    case ErrorCode::MissingHeroRecord: return "MissingHeroRecord";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingleCluster: return "SingleCluster";
    case ErrorCode::EmptyLabelSet: return "EmptyLabelSet";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::MixedDimensions: return "MixedDimensions";
    case ErrorCode::WrongTeamSize: return "WrongTeamSize";
    case ErrorCode::IdOutOfRange: return "IdOutOfRange";
    case ErrorCode::UnknownCharacter: return "UnknownCharacter";
    case ErrorCode::NetworkError: return "NetworkError";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above; the
/// CLI maps them onto process exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace herocluster
