#include "dapien/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dapien/distributions.hpp"
#include "dapien/error.hpp"
#include "dapien/random.hpp"

namespace dapien {

std::string_view to_string(BootstrapSigma rule) {
  return rule == BootstrapSigma::StdDev ? "std_dev" : "summed_variance";
}

BootstrapSigma parse_bootstrap_sigma(std::string_view name) {
  if (name == "std_dev") return BootstrapSigma::StdDev;
  if (name == "summed_variance") return BootstrapSigma::SummedVariance;
  throw Error(ErrorKind::ConfigError, "unknown bootstrap sigma rule '" + std::string(name) + "'");
}

std::size_t BootstrapModel::dimension() const { return noise_model.weights.size(); }

BootstrapModel bootstrap_fit(std::span<const Sample> samples, int b, const TrainConfig& config) {
  if (b < 2) throw Error(ErrorKind::DomainError, "bootstrap needs at least 2 members");
  if (samples.empty()) throw Error(ErrorKind::EmptyDataset, "no samples for bootstrap");
  const std::size_t n = samples.size();

  std::vector<BitVector> xs;
  std::vector<double> ys;
  xs.reserve(n);
  ys.reserve(n);
  for (const Sample& s : samples) {
    xs.push_back(s.x);
    ys.push_back(s.y);
  }

  BootstrapModel model;
  model.b = b;
  std::vector<BitVector> rx(n);
  std::vector<double> ry(n);
  for (int i = 0; i < b; ++i) {
    const std::uint64_t member_seed = derive_seed(config.seed, static_cast<std::uint64_t>(i));
    Rng rng(member_seed);
    for (std::size_t j = 0; j < n; ++j) {
      const auto pick = rng.bounded(n);
      rx[j] = xs[pick];
      ry[j] = ys[pick];
    }
    TrainConfig member_config = config;
    member_config.seed = member_seed;
    model.members.push_back(train(rx, ry, Activation::Identity, member_config));
  }

  std::vector<double> residual(n);
  for (std::size_t j = 0; j < n; ++j) {
    const EnsembleMoments m = ensemble_moments(model, xs[j]);
    const double err = ys[j] - m.mean;
    residual[j] = std::max(0.0, err * err - m.variance);
  }
  TrainConfig noise_config = config;
  noise_config.seed = derive_seed(config.seed, static_cast<std::uint64_t>(b));
  model.noise_model = train(xs, residual, Activation::Exponential, noise_config);
  return model;
}

EnsembleMoments ensemble_moments(const BootstrapModel& model, std::span<const std::uint8_t> x) {
  const auto b = static_cast<double>(model.members.size());
  std::vector<double> preds;
  preds.reserve(model.members.size());
  for (const LinearModel& m : model.members) preds.push_back(predict(m, x));
  double mean = 0.0;
  for (double p : preds) mean += p;
  mean /= b;
  double ss = 0.0;
  for (double p : preds) ss += (p - mean) * (p - mean);
  return {mean, preds.size() > 1 ? ss / (b - 1.0) : 0.0};
}

PredictionInterval bootstrap_predict_interval(const BootstrapModel& model, std::span<const std::uint8_t> x,
                                              double confidence, BootstrapSigma rule) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorKind::DomainError, "confidence must lie in (0, 1)");
  }
  const EnsembleMoments m = ensemble_moments(model, x);
  const double total = m.variance + std::max(0.0, predict(model.noise_model, x));
  const double sigma = rule == BootstrapSigma::StdDev ? std::sqrt(total) : total;
  const double half = t_quantile(confidence, static_cast<double>(model.b)) * sigma;
  return {m.mean - half, m.mean + half, confidence};
}

double bootstrap_predict_point(const BootstrapModel& model, std::span<const std::uint8_t> x) {
  return ensemble_moments(model, x).mean;
}

}  // namespace dapien
