#pragma once

#include <cstddef>
#include <span>

#include "dapien/types.hpp"

namespace dapien {

struct EvaluationReport {
  double picp = 0.0;
  double mpiw = 0.0;
  double nmpiw = 0.0;
  double cwc = 0.0;
  std::size_t n = 0;
  double confidence = 0.95;
  double cwc_mu = 0.95;
  double cwc_eta = 50.0;
};

/// Fraction of targets inside their closed interval [lower, upper].
double picp(std::span<const PredictionInterval> intervals, std::span<const double> targets);

double mpiw(std::span<const PredictionInterval> intervals);

/// MPIW divided by the range of the given targets.
double nmpiw(std::span<const PredictionInterval> intervals, std::span<const double> targets);

/// nmpiw * (1 + gamma * exp(-eta * (picp - mu))), gamma = 0 when picp >= mu.
double cwc(double picp, double nmpiw, double mu, double eta);

EvaluationReport evaluate(std::span<const PredictionInterval> intervals, std::span<const double> targets,
                          double confidence, double cwc_mu, double cwc_eta);

}  // namespace dapien
