#pragma once

#include <stdexcept>
#include <string>

namespace chainml {

enum class ErrorCode {
  Overflow,
  DivisionByZero,
  InvalidArgument,
  FeatureOutOfRange,
  InsufficientBalance,
  NotOwner,
  UnknownVersion,
  AlreadyRevealed,
  WrongPhase,
  TooEarly,
  ModelDisagrees,
  ModelAgrees,
  AlreadyRefunded,
  NothingClaimable,
  OverClaim,
  RepeatClaimant,
  SelfReport,
  NotYetRefundedReporter,
  DepositTooLow,
  RewardBelowMinimum,
  DuplicateData,
  AlreadySettled,
  EndConditionViolation,
  BadCommitmentCount,
  ParseError,
};

const char* error_name(ErrorCode c);

// Single exception type used by every guard in the library. Tests match
// on the code, not the message.
class ChainError : public std::runtime_error {
 public:
  ChainError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::Overflow: return "overflow";
    case ErrorCode::DivisionByZero: return "division by zero";
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::FeatureOutOfRange: return "feature index out of range";
    case ErrorCode::InsufficientBalance: return "insufficient balance";
    case ErrorCode::NotOwner: return "caller is not the owner";
    case ErrorCode::UnknownVersion: return "unknown model version";
    case ErrorCode::AlreadyRevealed: return "commitment already revealed";
    case ErrorCode::WrongPhase: return "wrong phase";
    case ErrorCode::TooEarly: return "too early";
    case ErrorCode::ModelDisagrees: return "model disagrees with label";
    case ErrorCode::ModelAgrees: return "model agrees with label";
    case ErrorCode::AlreadyRefunded: return "already refunded";
    case ErrorCode::NothingClaimable: return "nothing claimable";
    case ErrorCode::OverClaim: return "claim exceeds remaining deposit";
    case ErrorCode::RepeatClaimant: return "claimant already paid";
    case ErrorCode::SelfReport: return "reporter is the contributor";
    case ErrorCode::NotYetRefundedReporter: return "reporter has no refunded data";
    case ErrorCode::DepositTooLow: return "deposit below requirement";
    case ErrorCode::RewardBelowMinimum: return "remaining deposit below minimum reward";
    case ErrorCode::DuplicateData: return "duplicate contribution";
    case ErrorCode::AlreadySettled: return "already settled";
    case ErrorCode::EndConditionViolation: return "end condition violation";
    case ErrorCode::BadCommitmentCount: return "wrong number of commitments";
    case ErrorCode::ParseError: return "parse error";
  }
  return "unknown error";
}

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw ChainError(code, what);
}

}  // namespace chainml
