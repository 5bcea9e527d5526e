#include "dapien/regressor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include "dapien/error.hpp"
#include "dapien/random.hpp"

namespace dapien {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

constexpr double kMaxStepLength = 10.0;

struct LineSearchResult {
  bool ok = false;
  double step = 0.0;
  double loss = 0.0;
  std::vector<double> params;
  std::vector<double> grad;
};

LineSearchResult line_search(const LeastSquaresProblem& problem, std::span<const double> x,
                             double f0, std::span<const double> dir, double slope, double step) {
  constexpr double kArmijo = 1e-4;
  const std::size_t n = x.size();
  std::vector<double> trial(n);
  std::vector<double> grad(n);
  auto eval = [&](double a) {
    for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + a * dir[i];
    return problem.loss(trial);
  };
  auto accept = [&](double a, double fa) { return std::isfinite(fa) && fa <= f0 + kArmijo * a * slope; };

  LineSearchResult result;
  for (int k = 0; k < 60 && step > 0.0; ++k) {
    const double fa = eval(step);
    if (!std::isfinite(fa)) {
      step *= 0.1;
      continue;
    }
    // Minimizer of the quadratic through f0, slope and fa.
    const double curvature = fa - f0 - slope * step;
    double best_step = accept(step, fa) ? step : 0.0;
    double best_loss = best_step > 0.0 ? fa : f0;
    double next = 0.5 * step;
    if (curvature > 0.0) {
      const double q = -slope * step * step / (2.0 * curvature);
      if (std::isfinite(q) && q > 0.0 && q != step) {
        const double fq = eval(q);
        if (accept(q, fq) && fq < best_loss) {
          best_step = q;
          best_loss = fq;
        }
      }
      next = std::clamp(q, 0.1 * step, 0.5 * step);
    }
    if (best_step > 0.0) {
      result.ok = true;
      result.step = best_step;
      result.params.resize(n);
      for (std::size_t i = 0; i < n; ++i) result.params[i] = x[i] + best_step * dir[i];
      result.grad.resize(n);
      result.loss = problem.evaluate(result.params, result.grad);
      return result;
    }
    step = next;
  }
  return result;
}

std::vector<double> subset(std::span<const double> v, std::span<const std::size_t> idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(v[i]);
  return out;
}

std::vector<BitVector> subset(std::span<const BitVector> v, std::span<const std::size_t> idx) {
  std::vector<BitVector> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(v[i]);
  return out;
}

LinearModel fit_once(std::span<const BitVector> xs, std::span<const double> ts, Activation activation,
                     const TrainConfig& config, double l2) {
  const LeastSquaresProblem problem(xs, ts, activation, l2);
  const std::vector<double> start(problem.dimension(), 0.0);
  // The tolerance is relative to the mean squared target so tiny targets still get fitted.
  double scale = 0.0;
  for (double t : ts) scale += t * t;
  scale = std::max(scale / static_cast<double>(ts.size()), kPositiveTargetFloor * kPositiveTargetFloor);
  CgResult result = minimize_cg(problem, start, config.max_iterations, config.gradient_tolerance * std::min(1.0, scale));
  LinearModel model;
  model.activation = activation;
  model.bias = result.params.back();
  result.params.pop_back();
  model.weights = std::move(result.params);
  return model;
}

// Validates inputs and returns the training targets (clamped for the
// exponential activation).
std::vector<double> prepare_targets(std::span<const BitVector> xs, std::span<const double> ts,
                                    Activation activation) {
  if (xs.size() != ts.size()) {
    throw Error(ErrorKind::LengthMismatch, "inputs and targets differ in length");
  }
  if (xs.empty()) throw Error(ErrorKind::EmptyDataset, "no training data");
  const std::size_t d = xs.front().size();
  for (const auto& x : xs) {
    if (x.size() != d) throw Error(ErrorKind::DimensionMismatch, "training inputs differ in length");
  }
  std::vector<double> out(ts.begin(), ts.end());
  for (double& t : out) {
    if (!std::isfinite(t)) throw Error(ErrorKind::InvalidTarget, "non-finite training target");
    if (activation == Activation::Exponential && t <= kPositiveTargetFloor) t = kPositiveTargetFloor;
  }
  return out;
}

}  // namespace

std::string_view to_string(Activation activation) {
  return activation == Activation::Identity ? "identity" : "exponential";
}

Activation parse_activation(std::string_view name) {
  if (name == "identity") return Activation::Identity;
  if (name == "exponential") return Activation::Exponential;
  throw Error(ErrorKind::ParseError, "unknown activation '" + std::string(name) + "'");
}

double predict(const LinearModel& model, std::span<const std::uint8_t> x) {
  if (x.size() != model.weights.size()) {
    throw Error(ErrorKind::DimensionMismatch, "input has " + std::to_string(x.size()) +
                                                  " features, model expects " +
                                                  std::to_string(model.weights.size()));
  }
  double z = model.bias;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0) z += model.weights[i];
  }
  return model.activation == Activation::Identity ? z : std::exp(z);
}

LeastSquaresProblem::LeastSquaresProblem(std::span<const BitVector> xs, std::span<const double> ts,
                                         Activation activation, double l2_penalty)
    : activation_(activation), l2_(l2_penalty) {
  if (xs.size() != ts.size()) throw Error(ErrorKind::LengthMismatch, "inputs and targets differ in length");
  if (xs.empty()) throw Error(ErrorKind::EmptyDataset, "no training data");
  d_ = xs.front().size();

  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::vector<double>> targets;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].size() != d_) throw Error(ErrorKind::DimensionMismatch, "training inputs differ in length");
    auto [it, inserted] = index.try_emplace(bit_key(xs[i]), rows_.size());
    if (inserted) {
      Row row;
      for (std::size_t j = 0; j < d_; ++j) {
        if (xs[i][j] != 0) row.active.push_back(static_cast<std::uint32_t>(j));
      }
      rows_.push_back(std::move(row));
      targets.emplace_back();
    }
    targets[it->second].push_back(ts[i]);
  }
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const auto& group = targets[r];
    const double mean = std::accumulate(group.begin(), group.end(), 0.0) / static_cast<double>(group.size());
    rows_[r].weight = static_cast<double>(group.size());
    rows_[r].mean_target = mean;
    for (double t : group) within_ss_ += (t - mean) * (t - mean);
  }
  total_weight_ = static_cast<double>(xs.size());
}

double LeastSquaresProblem::evaluate(std::span<const double> params, std::span<double> grad) const {
  std::fill(grad.begin(), grad.end(), 0.0);
  const double bias = params[d_];
  double sse = within_ss_;
  for (const Row& row : rows_) {
    double z = bias;
    for (auto j : row.active) z += params[j];
    double f = z;
    double df = 1.0;
    if (activation_ == Activation::Exponential) {
      f = std::exp(z);
      df = f;
    }
    const double r = f - row.mean_target;
    sse += row.weight * r * r;
    const double coef = 2.0 * row.weight * r * df / total_weight_;
    for (auto j : row.active) grad[j] += coef;
    grad[d_] += coef;
  }
  double penalty = 0.0;
  for (std::size_t j = 0; j < d_; ++j) {
    penalty += params[j] * params[j];
    grad[j] += 2.0 * l2_ * params[j];
  }
  return sse / total_weight_ + l2_ * penalty;
}

double LeastSquaresProblem::loss(std::span<const double> params) const {
  std::vector<double> scratch(dimension());
  return evaluate(params, scratch);
}

CgResult minimize_cg(const LeastSquaresProblem& problem, std::span<const double> start,
                     int max_iterations, double gradient_tolerance) {
  const std::size_t n = problem.dimension();
  CgResult result;
  result.params.assign(start.begin(), start.end());
  std::vector<double> grad(n);
  double f = problem.evaluate(result.params, grad);
  result.loss_history.push_back(f);

  std::vector<double> dir(n);
  for (std::size_t i = 0; i < n; ++i) dir[i] = -grad[i];
  double prev_step = 0.0;
  double prev_slope = 0.0;
  int since_restart = 0;
  bool steepest = true;

  for (int it = 0; it < max_iterations; ++it) {
    const double gg = dot(grad, grad);
    if (std::sqrt(gg) <= gradient_tolerance) {
      result.converged = true;
      break;
    }
    double slope = dot(grad, dir);
    if (!(slope < 0.0)) {
      for (std::size_t i = 0; i < n; ++i) dir[i] = -grad[i];
      slope = -gg;
      steepest = true;
      since_restart = 0;
    }
    double step = prev_step > 0.0 ? prev_step * prev_slope / slope : 1.0 / std::max(1.0, std::sqrt(gg));
    if (!(step > 0.0) || !std::isfinite(step)) step = 1.0 / std::max(1.0, std::sqrt(gg));
    // Caps the parameter change per iteration; keeps exp() away from overflow and underflow.
    step = std::min(step, kMaxStepLength / std::sqrt(dot(dir, dir)));

    LineSearchResult ls = line_search(problem, result.params, f, dir, slope, step);
    if (!ls.ok || ls.loss >= f) {
      if (steepest) {
        // Loss can no longer resolve a decrease; accept if the gradient is at that noise level.
        const double noise = 10.0 * std::sqrt(std::numeric_limits<double>::epsilon() * std::abs(f));
        result.converged = std::sqrt(gg) <= std::max(gradient_tolerance, noise);
        break;
      }
      for (std::size_t i = 0; i < n; ++i) dir[i] = -grad[i];
      steepest = true;
      since_restart = 0;
      prev_step = 0.0;
      continue;
    }
    ++result.iterations;
    ++since_restart;

    double beta = 0.0;
    if (since_restart < static_cast<int>(n)) {
      double num = 0.0;
      for (std::size_t i = 0; i < n; ++i) num += ls.grad[i] * (ls.grad[i] - grad[i]);
      beta = std::max(0.0, num / gg);
    } else {
      since_restart = 0;
    }
    for (std::size_t i = 0; i < n; ++i) dir[i] = -ls.grad[i] + beta * dir[i];
    steepest = beta == 0.0;

    prev_step = ls.step;
    prev_slope = slope;
    result.params = std::move(ls.params);
    grad = std::move(ls.grad);
    f = ls.loss;
    result.loss_history.push_back(f);
  }
  if (!result.converged) {
    result.converged = std::sqrt(dot(grad, grad)) <= gradient_tolerance;
  }
  return result;
}

std::vector<int> stratified_folds(std::span<const double> ts, int k, std::uint64_t seed) {
  if (k < 1) throw Error(ErrorKind::DomainError, "fold count must be positive");
  if (ts.size() < static_cast<std::size_t>(k)) {
    throw Error(ErrorKind::TooFewSamples, std::to_string(ts.size()) + " samples cannot fill " +
                                              std::to_string(k) + " folds");
  }
  std::vector<std::size_t> order(ts.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.bounded(i)]);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ts[a] < ts[b]; });
  std::vector<int> folds(ts.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    folds[order[rank]] = static_cast<int>(rank % static_cast<std::size_t>(k));
  }
  return folds;
}

double cross_validation_error(std::span<const BitVector> xs, std::span<const double> ts,
                              Activation activation, const TrainConfig& config, double l2_penalty) {
  const std::vector<double> targets = prepare_targets(xs, ts, activation);
  const std::vector<int> folds = stratified_folds(targets, config.folds, config.seed);
  double sse = 0.0;
  for (int fold = 0; fold < config.folds; ++fold) {
    std::vector<std::size_t> fit_idx;
    std::vector<std::size_t> val_idx;
    for (std::size_t i = 0; i < folds.size(); ++i) {
      (folds[i] == fold ? val_idx : fit_idx).push_back(i);
    }
    if (fit_idx.empty()) continue;
    const auto fit_x = subset(xs, fit_idx);
    const auto fit_t = subset(targets, fit_idx);
    const LinearModel model = fit_once(fit_x, fit_t, activation, config, l2_penalty);
    for (auto i : val_idx) {
      const double r = predict(model, xs[i]) - targets[i];
      sse += r * r;
    }
  }
  return sse / static_cast<double>(targets.size());
}

LinearModel train(std::span<const BitVector> xs, std::span<const double> ts, Activation activation,
                  const TrainConfig& config) {
  const std::vector<double> targets = prepare_targets(xs, ts, activation);
  double l2 = config.l2_penalty;
  if (config.folds >= 2 && targets.size() >= static_cast<std::size_t>(config.folds)) {
    double best = std::numeric_limits<double>::infinity();
    for (double candidate : kL2Grid) {
      const double err = cross_validation_error(xs, targets, activation, config, candidate);
      if (err < best) {
        best = err;
        l2 = candidate;
      }
    }
  }
  return fit_once(xs, targets, activation, config, l2);
}

}  // namespace dapien
