#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smokegest {

/// Failure categories raised by the library. Every throw site picks exactly one.
enum class ErrorKind {
  EmptyRecording,
  MalformedRow,
  NonMonotonicTime,
  TooFewSamples,
  InvalidSize,
  LengthMismatch,
  EmptyBatch,
  EmptyDataset,
  NumericalFailure,
  InvalidThreshold,
  Empty,
  ContainsPositiveClass,
  SessionTooShort,
  ModeMismatch,
  EmptyTrace,
  InvalidArgument,
  Format,
  Io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyRecording: return "EmptyRecording";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::NonMonotonicTime: return "NonMonotonicTime";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::InvalidSize: return "InvalidSize";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyBatch: return "EmptyBatch";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::InvalidThreshold: return "InvalidThreshold";
    case ErrorKind::Empty: return "Empty";
    case ErrorKind::ContainsPositiveClass: return "ContainsPositiveClass";
    case ErrorKind::SessionTooShort: return "SessionTooShort";
    case ErrorKind::ModeMismatch: return "ModeMismatch";
    case ErrorKind::EmptyTrace: return "EmptyTrace";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Format: return "Format";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace smokegest
