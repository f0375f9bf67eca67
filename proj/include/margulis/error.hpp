#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace margulis {

enum class ErrorCode {
  NotSpacelike,
  NotTimelike,
  DegenerateFrame,
  NotHyperbolicType,
  EigenFailure,
  NotInvolution,
  InvalidConfiguration,
  EmptyInterval,
  ClassificationFailure,
  NegativeCoefficient,
  RankUnexpected,
  DegeneratePolygon,
  IllConditioned,
  NotQuadrilateral,
  InscriptionFailure,
  NonmonotoneTrace,
  OutOfChart,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSpacelike: return "NotSpacelike";
    case ErrorCode::NotTimelike: return "NotTimelike";
    case ErrorCode::DegenerateFrame: return "DegenerateFrame";
    case ErrorCode::NotHyperbolicType: return "NotHyperbolicType";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::NotInvolution: return "NotInvolution";
    case ErrorCode::InvalidConfiguration: return "InvalidConfiguration";
    case ErrorCode::EmptyInterval: return "EmptyInterval";
    case ErrorCode::ClassificationFailure: return "ClassificationFailure";
    case ErrorCode::NegativeCoefficient: return "NegativeCoefficient";
    case ErrorCode::RankUnexpected: return "RankUnexpected";
    case ErrorCode::DegeneratePolygon: return "DegeneratePolygon";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::NotQuadrilateral: return "NotQuadrilateral";
    case ErrorCode::InscriptionFailure: return "InscriptionFailure";
    case ErrorCode::NonmonotoneTrace: return "NonmonotoneTrace";
    case ErrorCode::OutOfChart: return "OutOfChart";
  }
  return "Unknown";
}

/// Domain errors map to configuration problems; the rest are numerical failures.
constexpr bool is_domain_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSpacelike:
    case ErrorCode::NotTimelike:
    case ErrorCode::NotInvolution:
    case ErrorCode::NotHyperbolicType:
    case ErrorCode::InvalidConfiguration:
    case ErrorCode::EmptyInterval:
    case ErrorCode::NegativeCoefficient:
    case ErrorCode::OutOfChart:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace margulis
