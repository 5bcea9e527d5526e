#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dapien/distributions.hpp"
#include "dapien/grouping.hpp"
#include "dapien/regressor.hpp"
#include "dapien/types.hpp"

namespace dapien {

/// One regressor per distribution parameter, in the fixed order
///   Gaussian: [mean (identity), sigma (exponential)]
///   Gamma:    [shape (exponential), rate (exponential), location (identity)]
/// ndf (the mean training group size) is set only for the Gaussian family.
struct DapienModel {
  DistFamily family = DistFamily::Gaussian;
  std::vector<LinearModel> param_models;
  std::optional<double> ndf;

  std::size_t dimension() const;
};

std::size_t parameter_count(DistFamily family);

/// Groups the samples by input, fits the family per group and trains one
/// regressor per parameter on the resulting (x, theta) table.
/// For the Gaussian family the sigma regressor is trained on sqrt(variance).
DapienModel dapien_fit(std::span<const Sample> samples, DistFamily family, const TrainConfig& config);

/// Same as above, starting from an already-grouped dataset.
DapienModel dapien_fit(const GroupedDataset& grouped, DistFamily family, const TrainConfig& config);

/// Parameters the model predicts for x. Gaussian variance is sigma^2.
DistParams dapien_predict_params(const DapienModel& model, std::span<const std::uint8_t> x);

PredictionInterval dapien_predict_interval(const DapienModel& model, std::span<const std::uint8_t> x,
                                           double confidence);

/// Center of the predicted distribution: the mean for Gaussian,
/// location + shape / rate for Gamma.
double dapien_predict_point(const DapienModel& model, std::span<const std::uint8_t> x);

struct DegenerateFilter {
  std::vector<Sample> kept;
  std::vector<BitVector> dropped;
};

/// Removes every group the family cannot be fitted to (for Gamma: fewer than
/// three values or zero spread). The Gaussian family never drops anything.
DegenerateFilter drop_degenerate_groups(std::span<const Sample> samples, DistFamily family);

void validate(const DapienModel& model);

}  // namespace dapien
