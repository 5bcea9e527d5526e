#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dapien/regressor.hpp"
#include "dapien/types.hpp"

namespace dapien {

/// Resampled ensemble of identity regressors plus an exponential-activation
/// regressor of the residual noise variance.
struct BootstrapModel {
  std::vector<LinearModel> members;
  LinearModel noise_model;
  int b = 0;

  std::size_t dimension() const;
};

/// How the two variance estimates become the interval scale.
///
/// StdDev uses sigma = sqrt(ensemble variance + noise variance).
/// SummedVariance uses the summed variance itself as sigma. Widths then
/// scale with the square of the noise level: narrow below unit variance,
/// wide above it.
enum class BootstrapSigma { StdDev, SummedVariance };

std::string_view to_string(BootstrapSigma rule);
BootstrapSigma parse_bootstrap_sigma(std::string_view name);

struct EnsembleMoments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased, divisor b - 1
};

/// Phase one trains b identity members on seeded resamples (with
/// replacement, same size as the data); member i draws from
/// derive_seed(config.seed, i). Phase two trains the noise model on
/// r^2 = max(0, (y - ensemble mean)^2 - ensemble variance) per training sample.
BootstrapModel bootstrap_fit(std::span<const Sample> samples, int b, const TrainConfig& config);

EnsembleMoments ensemble_moments(const BootstrapModel& model, std::span<const std::uint8_t> x);

/// Symmetric interval mu +- c * sigma, c = t_quantile(confidence, b), with the
/// noise prediction clamped at zero before it is added.
PredictionInterval bootstrap_predict_interval(const BootstrapModel& model, std::span<const std::uint8_t> x,
                                              double confidence,
                                              BootstrapSigma rule = BootstrapSigma::StdDev);

double bootstrap_predict_point(const BootstrapModel& model, std::span<const std::uint8_t> x);

}  // namespace dapien
