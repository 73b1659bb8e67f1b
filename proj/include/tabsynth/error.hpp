#ifndef TABSYNTH_ERROR_HPP
#define TABSYNTH_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace tabsynth {

enum class ErrorKind {
  InvalidArgument,
  InvalidSchema,
  ParseError,
  IoFailure,
  MissingColumn,
  DuplicateHeader,
  TypeMismatch,
  UnknownColumn,
  ColumnCollision,
  NonBinaryComponent,
  NonPositiveValue,
  TooFewValues,
  UnknownLabel,
  NonNumericColumn,
  DegenerateBounds,
  CalibrationFailed,
  InfeasibleTarget,
  NonPositiveBmi,
  SchemaMismatch,
  ZeroRange,
  OutOfRange,
  SingleClassLabels,
  EmptyFeatures,
  FeatureMismatch,
  LengthMismatch,
  NoPositives,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidSchema: return "InvalidSchema";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::DuplicateHeader: return "DuplicateHeader";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::UnknownColumn: return "UnknownColumn";
    case ErrorKind::ColumnCollision: return "ColumnCollision";
    case ErrorKind::NonBinaryComponent: return "NonBinaryComponent";
    case ErrorKind::NonPositiveValue: return "NonPositiveValue";
    case ErrorKind::TooFewValues: return "TooFewValues";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::NonNumericColumn: return "NonNumericColumn";
    case ErrorKind::DegenerateBounds: return "DegenerateBounds";
    case ErrorKind::CalibrationFailed: return "CalibrationFailed";
    case ErrorKind::InfeasibleTarget: return "InfeasibleTarget";
    case ErrorKind::NonPositiveBmi: return "NonPositiveBmi";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::ZeroRange: return "ZeroRange";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::SingleClassLabels: return "SingleClassLabels";
    case ErrorKind::EmptyFeatures: return "EmptyFeatures";
    case ErrorKind::FeatureMismatch: return "FeatureMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NoPositives: return "NoPositives";
  }
  return "Unknown";
}

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tabsynth

#endif  // TABSYNTH_ERROR_HPP
