#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mum {

enum class ErrorCode {
  InvalidModulus,
  NotInvertible,
  SetSaturated,
  LengthMismatch,
  HeapNotCoprime,
  EmptyHeaps,
  NonPositiveHeap,
  IllegalMove,
  ProductOverflow,
  HeapTooSmall,
  ModulusMismatch,
  FactorMismatch,
  NotIrreducible,
  NotMonic,
  NotPrime,
  FieldMismatch,
  ZeroInverse,
  FieldTooLarge,
  HeapOutOfField,
  SearchBudgetExceeded,
  ParseError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidModulus: return "InvalidModulus";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::SetSaturated: return "SetSaturated";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::HeapNotCoprime: return "HeapNotCoprime";
    case ErrorCode::EmptyHeaps: return "EmptyHeaps";
    case ErrorCode::NonPositiveHeap: return "NonPositiveHeap";
    case ErrorCode::IllegalMove: return "IllegalMove";
    case ErrorCode::ProductOverflow: return "ProductOverflow";
    case ErrorCode::HeapTooSmall: return "HeapTooSmall";
    case ErrorCode::ModulusMismatch: return "ModulusMismatch";
    case ErrorCode::FactorMismatch: return "FactorMismatch";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::NotMonic: return "NotMonic";
    case ErrorCode::NotPrime: return "NotPrime";
    case ErrorCode::FieldMismatch: return "FieldMismatch";
    case ErrorCode::ZeroInverse: return "ZeroInverse";
    case ErrorCode::FieldTooLarge: return "FieldTooLarge";
    case ErrorCode::HeapOutOfField: return "HeapOutOfField";
    case ErrorCode::SearchBudgetExceeded: return "SearchBudgetExceeded";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code and a
/// message naming the violated rule (e.g. "heap 10 not coprime to 5").
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mum
