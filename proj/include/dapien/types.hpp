#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dapien {

/// Nominal input encoded as 0/1 bytes.
using BitVector = std::vector<std::uint8_t>;

struct Sample {
  BitVector x;
  double y = 0.0;
};

struct PredictionInterval {
  double lower = 0.0;
  double upper = 0.0;
  double confidence = 0.95;
};

/// Canonical "0101..." key used for exact-match grouping.
std::string bit_key(const BitVector& x);

}  // namespace dapien
