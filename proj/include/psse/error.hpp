#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace psse {

enum class ErrorCode {
  InvalidArgument,
  NonFiniteCoefficient,
  DegenerateTail,
  ZeroDenominator,
  NoDeparture,
  BadOrigin,
  DegreeExhausted,
  ZeroNorm,
  ZeroReference,
  TauTooLarge,
  EmptyScan,
  LostBracket,
  BadParams,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFiniteCoefficient: return "NonFiniteCoefficient";
    case ErrorCode::DegenerateTail: return "DegenerateTail";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::NoDeparture: return "NoDeparture";
    case ErrorCode::BadOrigin: return "BadOrigin";
    case ErrorCode::DegreeExhausted: return "DegreeExhausted";
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::ZeroReference: return "ZeroReference";
    case ErrorCode::TauTooLarge: return "TauTooLarge";
    case ErrorCode::EmptyScan: return "EmptyScan";
    case ErrorCode::LostBracket: return "LostBracket";
    case ErrorCode::BadParams: return "BadParams";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the recurrence when a coefficient overflows; `index` is the last valid one.
class NonFiniteCoefficientError : public Error {
 public:
  NonFiniteCoefficientError(std::size_t last_valid, const std::string& what)
      : Error(ErrorCode::NonFiniteCoefficient, what), last_valid_(last_valid) {}

  std::size_t last_valid_index() const noexcept { return last_valid_; }

 private:
  std::size_t last_valid_;
};

}  // namespace psse
