#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zsslr {

enum class ErrorKind {
  MissingFile,
  ParseError,
  InvariantViolation,
  InvalidConfig,
  EmptySequence,
  MissingHandStream,
  MissingReduction,
  DimensionMismatch,
  IndexOutOfRange,
  EmptyCandidates,
  DegenerateData,
  NonFiniteLoss,
  SingularSystem,
  IoError,
  SchemaMismatch,
  EmptyEvaluationSet,
  UnrankedClass,
  ModeWithoutAttributes,
  NoMisclassifications,
  InstanceTooLarge,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::EmptySequence: return "EmptySequence";
    case ErrorKind::MissingHandStream: return "MissingHandStream";
    case ErrorKind::MissingReduction: return "MissingReduction";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::EmptyCandidates: return "EmptyCandidates";
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::EmptyEvaluationSet: return "EmptyEvaluationSet";
    case ErrorKind::UnrankedClass: return "UnrankedClass";
    case ErrorKind::ModeWithoutAttributes: return "ModeWithoutAttributes";
    case ErrorKind::NoMisclassifications: return "NoMisclassifications";
    case ErrorKind::InstanceTooLarge: return "InstanceTooLarge";
  }
  return "Unknown";
}

/// Every failure raised by the library. `kind()` is stable and used by the CLI
/// to pick an exit code; `what()` is "<Kind>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace zsslr
