#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mixtv {

enum class ErrorKind {
  kShapeMismatch,
  kNotAProbability,
  kNormalizationError,
  kNoActiveComponent,
  kZeroDiscrepancy,
  kFactViolation,
  kZeroDenominator,
  kNotASubcube,
  kWrongAlphabet,
  kTooLarge,
  kNotThreeCnf,
  kInvalidArgument,
  kParseError,
};

std::string_view error_kind_name(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so the
/// CLI can map it onto an exit code without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mixtv
