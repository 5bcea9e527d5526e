#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dapien/types.hpp"

namespace dapien {

enum class Activation { Identity, Exponential };

std::string_view to_string(Activation activation);
Activation parse_activation(std::string_view name);

/// Feedforward network with no hidden layer: activation(w . x + b).
struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  Activation activation = Activation::Identity;
};

struct TrainConfig {
  int max_iterations = 2000;
  /// Scaled down by the mean squared target when that is below 1.
  double gradient_tolerance = 1e-9;
  /// Number of cross-validation folds used to pick l2_penalty from
  /// kL2Grid. Values below 2 disable model selection and train with
  /// l2_penalty as given.
  int folds = 5;
  std::uint64_t seed = 0;
  double l2_penalty = 0.0;
};

inline constexpr std::array<double, 4> kL2Grid{0.0, 1e-6, 1e-4, 1e-2};

/// Exponential-activation targets at or below zero are raised to this floor.
inline constexpr double kPositiveTargetFloor = 1e-9;

double predict(const LinearModel& model, std::span<const std::uint8_t> x);

/// Mean squared error objective over a binary design, with an l2 penalty on
/// the weights (not the bias). Rows sharing an input are merged into one
/// weighted row holding the mean target; the within-row sum of squares is
/// kept as a constant, so loss values and gradients are exactly those of the
/// original per-sample objective.
class LeastSquaresProblem {
 public:
  LeastSquaresProblem(std::span<const BitVector> xs, std::span<const double> ts,
                      Activation activation, double l2_penalty);

  /// Parameters are laid out as [w_0, ..., w_{d-1}, b].
  std::size_t dimension() const { return d_ + 1; }
  std::size_t unique_rows() const { return rows_.size(); }

  /// Returns the loss and writes its gradient into grad (size dimension()).
  double evaluate(std::span<const double> params, std::span<double> grad) const;
  double loss(std::span<const double> params) const;

 private:
  struct Row {
    std::vector<std::uint32_t> active;  // indices of set bits
    double weight = 0.0;
    double mean_target = 0.0;
  };

  std::size_t d_ = 0;
  std::vector<Row> rows_;
  double total_weight_ = 0.0;
  double within_ss_ = 0.0;
  Activation activation_;
  double l2_;
};

struct CgResult {
  std::vector<double> params;
  std::vector<double> loss_history;
  int iterations = 0;
  bool converged = false;
};

/// Polak-Ribiere(+) nonlinear conjugate gradient with a restart to steepest
/// descent whenever the direction stops being a descent direction, and every
/// dimension() iterations. Steps come from a backtracking Armijo search seeded
/// by quadratic interpolation, so the loss never increases.
CgResult minimize_cg(const LeastSquaresProblem& problem, std::span<const double> start,
                     int max_iterations, double gradient_tolerance);

/// Fold index in [0, k) per sample: samples are ranked by target (ties
/// broken by a seeded shuffle) and dealt round-robin by rank.
std::vector<int> stratified_folds(std::span<const double> ts, int k, std::uint64_t seed);

/// Full-batch CG training from a zero start. With config.folds >= 2 (and at
/// least that many samples) the l2 penalty is chosen from kL2Grid by
/// stratified k-fold validation MSE, then the model is refit on all data.
LinearModel train(std::span<const BitVector> xs, std::span<const double> ts, Activation activation,
                  const TrainConfig& config);

/// Validation MSE of a penalty choice under stratified k-fold CV.
double cross_validation_error(std::span<const BitVector> xs, std::span<const double> ts,
                              Activation activation, const TrainConfig& config, double l2_penalty);

}  // namespace dapien
