#pragma once

#include <stdexcept>
#include <string>

namespace qlsforge {

enum class ErrorKind {
  NotSquare,
  NotLatin,
  BadSymbol,
  LengthMismatch,
  DimensionMismatch,
  IndexOutOfRange,
  Contradiction,
  ResourceLimit,
  PreconditionViolated,
  WrongOrder,
  MalformedTrace,
  OrderMismatch,
  InvalidPair,
  EmptySupport,
  WeightTooHigh,
  NotCrossOrthogonal,
  NotSquareDimension,
  ParseError,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::NotLatin: return "NotLatin";
    case ErrorKind::BadSymbol: return "BadSymbol";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::Contradiction: return "Contradiction";
    case ErrorKind::ResourceLimit: return "ResourceLimit";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::WrongOrder: return "WrongOrder";
    case ErrorKind::MalformedTrace: return "MalformedTrace";
    case ErrorKind::OrderMismatch: return "OrderMismatch";
    case ErrorKind::InvalidPair: return "InvalidPair";
    case ErrorKind::EmptySupport: return "EmptySupport";
    case ErrorKind::WeightTooHigh: return "WeightTooHigh";
    case ErrorKind::NotCrossOrthogonal: return "NotCrossOrthogonal";
    case ErrorKind::NotSquareDimension: return "NotSquareDimension";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// All library failures are reported through this exception; `kind()` tells
/// callers (the CLI in particular) which contract was broken.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qlsforge
