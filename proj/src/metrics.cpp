#include "dapien/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "dapien/error.hpp"

namespace dapien {
namespace {

void check_lengths(std::span<const PredictionInterval> intervals, std::span<const double> targets) {
  if (intervals.size() != targets.size()) {
    throw Error(ErrorKind::LengthMismatch, "interval and target counts differ");
  }
  if (intervals.empty()) throw Error(ErrorKind::EmptyInput, "no intervals to evaluate");
}

}  // namespace

double picp(std::span<const PredictionInterval> intervals, std::span<const double> targets) {
  check_lengths(intervals, targets);
  std::size_t covered = 0;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (intervals[i].lower <= targets[i] && targets[i] <= intervals[i].upper) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(intervals.size());
}

double mpiw(std::span<const PredictionInterval> intervals) {
  if (intervals.empty()) throw Error(ErrorKind::EmptyInput, "no intervals to evaluate");
  double total = 0.0;
  for (const auto& pi : intervals) total += pi.upper - pi.lower;
  return total / static_cast<double>(intervals.size());
}

double nmpiw(std::span<const PredictionInterval> intervals, std::span<const double> targets) {
  check_lengths(intervals, targets);
  const auto [lo, hi] = std::minmax_element(targets.begin(), targets.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) throw Error(ErrorKind::ZeroRange, "targets have zero range");
  return mpiw(intervals) / range;
}

double cwc(double picp, double nmpiw, double mu, double eta) {
  const double gamma = picp >= mu ? 0.0 : 1.0;
  return nmpiw * (1.0 + gamma * std::exp(-eta * (picp - mu)));
}

EvaluationReport evaluate(std::span<const PredictionInterval> intervals, std::span<const double> targets,
                          double confidence, double cwc_mu, double cwc_eta) {
  EvaluationReport report;
  report.picp = picp(intervals, targets);
  report.mpiw = mpiw(intervals);
  report.nmpiw = nmpiw(intervals, targets);
  report.cwc = cwc(report.picp, report.nmpiw, cwc_mu, cwc_eta);
  report.n = intervals.size();
  report.confidence = confidence;
  report.cwc_mu = cwc_mu;
  report.cwc_eta = cwc_eta;
  return report;
}

}  // namespace dapien
