#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "dapien/types.hpp"

namespace dapien {

/// Noise added to f(x) = sum of bits.
enum class NoiseKind {
  ConditionalWhite,  ///< 0 when f(x) is even, else Normal(0, sd 0.2)
  ScaledWhite,       ///< f(x) * Normal(0, sd 0.1)
  ScaledGamma,       ///< f(x) * Gamma(shape 1, rate 1)
};

std::string_view to_string(NoiseKind noise);

struct GeneratorSpec {
  int d = 10;
  int replicates = 20;
  NoiseKind noise = NoiseKind::ConditionalWhite;
  std::uint64_t seed = 42;
};

struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t seed = 42;
};

struct Split {
  std::vector<Sample> train;
  std::vector<Sample> test;
};

/// Benchmark presets: 'A' conditional white, 'B' scaled white, 'C' scaled gamma.
GeneratorSpec dataset_spec(char name, std::uint64_t seed);

/// Enumerates every x in {0,1}^d in counting order (x_j is bit j of the
/// index) and emits `replicates` samples for each, drawing noise
/// independently per replicate from a single Rng(seed) stream.
std::vector<Sample> generate(const GeneratorSpec& spec);

/// Splits by distinct input: ceil(test_fraction * p) of the p inputs, chosen
/// by a seeded Fisher-Yates shuffle, go to test together with all their
/// replicates. Both halves keep the original sample order.
Split group_split(std::span<const Sample> samples, const SplitSpec& spec);

/// Header "x_0,...,x_{d-1},y"; y written in shortest round-trip form.
void write_csv(std::ostream& out, std::span<const Sample> samples);
std::vector<Sample> read_csv(std::istream& in);

}  // namespace dapien
