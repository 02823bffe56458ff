#pragma once

#include <stdexcept>
#include <string>

namespace gridscc {

enum class ErrorCode {
  // configuration
  ParseError,
  MissingFile,
  InvalidRange,
  // input data
  MissingColumn,
  NegativeExposure,
  DuplicateRow,
  UnknownRegion,
  OutOfRange,
  MissingPattern,
  NonMonotoneTable,
  ZeroPopulation,
  NonPositiveEcs,
  PhiOutOfRange,
  PulseOutsideAxis,
  YearOutOfRange,
  // runtime
  ZeroDenominator,
  VariantMismatch,
  EmptyEnsemble,
  IoFailure,
};

enum class ErrorCategory { Config, Data, Runtime };

constexpr const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NegativeExposure: return "NegativeExposure";
    case ErrorCode::DuplicateRow: return "DuplicateRow";
    case ErrorCode::UnknownRegion: return "UnknownRegion";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::MissingPattern: return "MissingPattern";
    case ErrorCode::NonMonotoneTable: return "NonMonotoneTable";
    case ErrorCode::ZeroPopulation: return "ZeroPopulation";
    case ErrorCode::NonPositiveEcs: return "NonPositiveEcs";
    case ErrorCode::PhiOutOfRange: return "PhiOutOfRange";
    case ErrorCode::PulseOutsideAxis: return "PulseOutsideAxis";
    case ErrorCode::YearOutOfRange: return "YearOutOfRange";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::VariantMismatch: return "VariantMismatch";
    case ErrorCode::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

constexpr ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::MissingFile:
    case ErrorCode::InvalidRange:
      return ErrorCategory::Config;
    case ErrorCode::ZeroDenominator:
    case ErrorCode::VariantMismatch:
    case ErrorCode::EmptyEnsemble:
    case ErrorCode::IoFailure:
      return ErrorCategory::Runtime;
    default:
      return ErrorCategory::Data;
  }
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace gridscc
