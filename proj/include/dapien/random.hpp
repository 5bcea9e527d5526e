#pragma once

#include <cstdint>
#include <random>

namespace dapien {

/// Seeded random source shared by the data generators, the train/test split
/// and bootstrap resampling.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard; at seed 42 its first five outputs are
///   13930160852258120406, 11788048577503494824, 13874630024467741450,
///   2513787319205155662, 16662371453428439381.
/// Every derived draw below is computed here from raw 64-bit outputs rather
/// than through <random> distributions, whose algorithms are left to the
/// standard library vendor. That keeps datasets bit-identical across
/// toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), rejection sampled (no modulo bias).
  std::uint64_t bounded(std::uint64_t n);

  /// Standard normal via the Marsaglia polar method (second variate discarded).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Unit-rate exponential by inversion.
  double exponential();

  /// Gamma(shape, rate) via Marsaglia-Tsang; shape < 1 uses the
  /// U^(1/shape) boost.
  double gamma(double shape, double rate);

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; derives independent child seeds from a parent seed
/// and a stream index.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace dapien
