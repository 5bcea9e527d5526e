#include "dapien/error.hpp"

namespace dapien {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyGroup: return "EmptyGroup";
    case ErrorKind::DegenerateGroup: return "DegenerateGroup";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::RaggedFeatures: return "RaggedFeatures";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidTarget: return "InvalidTarget";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::ZeroRange: return "ZeroRange";
    case ErrorKind::TooFewGroups: return "TooFewGroups";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace dapien
