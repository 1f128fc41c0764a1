#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace crowdkb {

// Stable machine-readable error codes. The names returned by code_name() are
// part of the HTTP and CLI contracts; do not rename.
enum class ErrorCode {
  // catalog
  MissingIdentifier,
  MalformedDuration,
  MalformedDate,
  MalformedHeader,
  MalformedRow,
  FileUnreadable,
  EmptyDataset,
  WriteFailure,
  // vocabulary
  UnknownTerm,
  AmbiguousTerm,
  NotAnEmotion,
  // campaign
  UnknownCampaign,
  DuplicateCampaign,
  TooFewItems,
  CampaignClosed,
  UnknownItem,
  DuplicateAnnotation,
  SelfVote,
  UnknownAnnotation,
  EmptyComment,
  CommentTooLong,
  // moderation
  UnknownItemInExport,
  // knowledge graph
  DuplicateTrackId,
  UnknownPredicate,
  InvalidIri,
  SyntaxError,
  // query
  UnknownPrefix,
  UnboundSelectVariable,
  TypeMismatch,
  // analytics
  EmptyTransactionSet,
  EmptyCorpus,
  // service
  PortInUse,
  CorruptStore,
  BadRequest,
  NotFound,
  // generic precondition failure
  InvalidArgument,
};

inline constexpr std::array kAllErrorCodes = {
    ErrorCode::MissingIdentifier,   ErrorCode::MalformedDuration,
    ErrorCode::MalformedDate,       ErrorCode::MalformedHeader,
    ErrorCode::MalformedRow,        ErrorCode::FileUnreadable,
    ErrorCode::EmptyDataset,        ErrorCode::WriteFailure,
    ErrorCode::UnknownTerm,         ErrorCode::AmbiguousTerm,
    ErrorCode::NotAnEmotion,        ErrorCode::UnknownCampaign,
    ErrorCode::DuplicateCampaign,   ErrorCode::TooFewItems,
    ErrorCode::CampaignClosed,      ErrorCode::UnknownItem,
    ErrorCode::DuplicateAnnotation, ErrorCode::SelfVote,
    ErrorCode::UnknownAnnotation,   ErrorCode::EmptyComment,
    ErrorCode::CommentTooLong,      ErrorCode::UnknownItemInExport,
    ErrorCode::DuplicateTrackId,    ErrorCode::UnknownPredicate,
    ErrorCode::InvalidIri,          ErrorCode::SyntaxError,
    ErrorCode::UnknownPrefix,       ErrorCode::UnboundSelectVariable,
    ErrorCode::TypeMismatch,        ErrorCode::EmptyTransactionSet,
    ErrorCode::EmptyCorpus,         ErrorCode::PortInUse,
    ErrorCode::CorruptStore,        ErrorCode::BadRequest,
    ErrorCode::NotFound,            ErrorCode::InvalidArgument,
};

constexpr std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingIdentifier: return "MissingIdentifier";
    case ErrorCode::MalformedDuration: return "MalformedDuration";
    case ErrorCode::MalformedDate: return "MalformedDate";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::FileUnreadable: return "FileUnreadable";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::WriteFailure: return "WriteFailure";
    case ErrorCode::UnknownTerm: return "UnknownTerm";
    case ErrorCode::AmbiguousTerm: return "AmbiguousTerm";
    case ErrorCode::NotAnEmotion: return "NotAnEmotion";
    case ErrorCode::UnknownCampaign: return "UnknownCampaign";
    case ErrorCode::DuplicateCampaign: return "DuplicateCampaign";
    case ErrorCode::TooFewItems: return "TooFewItems";
    case ErrorCode::CampaignClosed: return "CampaignClosed";
    case ErrorCode::UnknownItem: return "UnknownItem";
    case ErrorCode::DuplicateAnnotation: return "DuplicateAnnotation";
    case ErrorCode::SelfVote: return "SelfVote";
    case ErrorCode::UnknownAnnotation: return "UnknownAnnotation";
    case ErrorCode::EmptyComment: return "EmptyComment";
    case ErrorCode::CommentTooLong: return "CommentTooLong";
    case ErrorCode::UnknownItemInExport: return "UnknownItemInExport";
    case ErrorCode::DuplicateTrackId: return "DuplicateTrackId";
    case ErrorCode::UnknownPredicate: return "UnknownPredicate";
    case ErrorCode::InvalidIri: return "InvalidIri";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownPrefix: return "UnknownPrefix";
    case ErrorCode::UnboundSelectVariable: return "UnboundSelectVariable";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::EmptyTransactionSet: return "EmptyTransactionSet";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::PortInUse: return "PortInUse";
    case ErrorCode::CorruptStore: return "CorruptStore";
    case ErrorCode::BadRequest: return "BadRequest";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

inline std::optional<ErrorCode> code_from_name(std::string_view name) {
  for (ErrorCode c : kAllErrorCodes) {
    if (code_name(c) == name) return c;
  }
  return std::nullopt;
}

// All fallible operations throw Error. The code is what callers branch on;
// the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(code_name(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace crowdkb
