#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace eif {

enum class ErrorCode {
  EmptyLabel,
  DuplicateLabel,
  TooFewItems,
  LengthMismatch,
  DuplicateRank,
  RankOutOfRange,
  NonPositiveUtility,
  ValueOutOfScale,
  NotReciprocal,
  InvalidConfig,
  EmptyInput,
  ItemSetMismatch,
  DegenerateImpact,
  SOutOfRange,
  UnknownLabel,
  UnknownOperator,
  InvalidScenario,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyLabel: return "EmptyLabel";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::TooFewItems: return "TooFewItems";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DuplicateRank: return "DuplicateRank";
    case ErrorCode::RankOutOfRange: return "RankOutOfRange";
    case ErrorCode::NonPositiveUtility: return "NonPositiveUtility";
    case ErrorCode::ValueOutOfScale: return "ValueOutOfScale";
    case ErrorCode::NotReciprocal: return "NotReciprocal";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ItemSetMismatch: return "ItemSetMismatch";
    case ErrorCode::DegenerateImpact: return "DegenerateImpact";
    case ErrorCode::SOutOfRange: return "SOutOfRange";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::UnknownOperator: return "UnknownOperator";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
  }
  return "Unknown";
}

/// Every validation failure in the library is reported through this type.
/// `label()` names the offending item when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string label = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(std::move(message)),
        label_(std::move(label)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  const std::string& label() const noexcept { return label_; }

  /// Same error with a provenance prefix, e.g. "meta 'roles', ccf 'experience'".
  Error with_context(std::string_view context) const {
    return Error(code_, std::string(context) + ": " + detail_, label_);
  }

 private:
  ErrorCode code_;
  std::string detail_;
  std::string label_;
};

}  // namespace eif
