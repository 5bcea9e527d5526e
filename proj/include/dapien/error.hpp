#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dapien {

enum class ErrorKind {
  EmptyGroup,
  DegenerateGroup,
  NonConvergence,
  DomainError,
  EmptyDataset,
  RaggedFeatures,
  DimensionMismatch,
  InvalidTarget,
  TooFewSamples,
  LengthMismatch,
  EmptyInput,
  ZeroRange,
  TooFewGroups,
  ParseError,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers can branch on the cause without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace dapien
