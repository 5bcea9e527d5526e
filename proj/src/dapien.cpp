#include "dapien/dapien.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "dapien/error.hpp"
#include "dapien/random.hpp"

namespace dapien {
namespace {

struct ParamSpec {
  Activation activation;
  double (*extract)(const DistParams&);
};

double gaussian_mean(const DistParams& p) { return std::get<GaussianParams>(p).mean; }
double gaussian_sigma(const DistParams& p) { return std::sqrt(std::get<GaussianParams>(p).variance); }
double gamma_shape(const DistParams& p) { return std::get<GammaParams>(p).shape; }
double gamma_rate(const DistParams& p) { return std::get<GammaParams>(p).rate; }
double gamma_location(const DistParams& p) { return std::get<GammaParams>(p).location; }

std::vector<ParamSpec> param_specs(DistFamily family) {
  if (family == DistFamily::Gaussian) {
    return {{Activation::Identity, gaussian_mean}, {Activation::Exponential, gaussian_sigma}};
  }
  return {{Activation::Exponential, gamma_shape},
          {Activation::Exponential, gamma_rate},
          {Activation::Identity, gamma_location}};
}

bool is_degenerate(const std::vector<double>& ys, DistFamily family) {
  if (family == DistFamily::Gaussian) return false;
  return ys.size() < 3 ||
         std::all_of(ys.begin(), ys.end(), [&](double y) { return y == ys.front(); });
}

}  // namespace

std::size_t parameter_count(DistFamily family) { return family == DistFamily::Gaussian ? 2 : 3; }

std::size_t DapienModel::dimension() const {
  return param_models.empty() ? 0 : param_models.front().weights.size();
}

void validate(const DapienModel& model) {
  if (model.param_models.size() != parameter_count(model.family)) {
    throw Error(ErrorKind::DomainError, "model count does not match the distribution family");
  }
  if (model.ndf.has_value() != (model.family == DistFamily::Gaussian)) {
    throw Error(ErrorKind::DomainError, "ndf must be present exactly for the Gaussian family");
  }
  const auto specs = param_specs(model.family);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const LinearModel& m = model.param_models[i];
    if (m.activation != specs[i].activation) {
      throw Error(ErrorKind::DomainError, "parameter model " + std::to_string(i) + " has the wrong activation");
    }
    if (m.weights.size() != model.dimension()) {
      throw Error(ErrorKind::DimensionMismatch, "parameter models disagree on input dimension");
    }
  }
}

DapienModel dapien_fit(std::span<const Sample> samples, DistFamily family, const TrainConfig& config) {
  return dapien_fit(group_by_unique_input(samples), family, config);
}

DapienModel dapien_fit(const GroupedDataset& grouped, DistFamily family, const TrainConfig& config) {
  const DistDataset dist = build_dist_dataset(grouped, family);

  std::vector<BitVector> xs;
  xs.reserve(dist.rows.size());
  for (const DistRow& row : dist.rows) xs.push_back(row.x);

  DapienModel model;
  model.family = family;
  const auto specs = param_specs(family);
  for (std::size_t k = 0; k < specs.size(); ++k) {
    std::vector<double> targets;
    targets.reserve(dist.rows.size());
    for (const DistRow& row : dist.rows) targets.push_back(specs[k].extract(row.theta));
    TrainConfig param_config = config;
    param_config.seed = derive_seed(config.seed, k);
    model.param_models.push_back(train(xs, targets, specs[k].activation, param_config));
  }
  if (family == DistFamily::Gaussian) model.ndf = mean_group_size(grouped);
  return model;
}

DistParams dapien_predict_params(const DapienModel& model, std::span<const std::uint8_t> x) {
  if (x.size() != model.dimension()) {
    throw Error(ErrorKind::DimensionMismatch, "input has " + std::to_string(x.size()) +
                                                  " features, model expects " + std::to_string(model.dimension()));
  }
  const auto& m = model.param_models;
  if (model.family == DistFamily::Gaussian) {
    const double sigma = predict(m[1], x);
    return GaussianParams{predict(m[0], x), sigma * sigma};
  }
  return GammaParams{predict(m[0], x), predict(m[1], x), predict(m[2], x)};
}

PredictionInterval dapien_predict_interval(const DapienModel& model, std::span<const std::uint8_t> x,
                                           double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorKind::DomainError, "confidence must lie in (0, 1)");
  }
  const DistParams params = dapien_predict_params(model, x);
  std::pair<double, double> bounds;
  if (model.family == DistFamily::Gaussian) {
    const double c = t_quantile(confidence, model.ndf.value());
    bounds = gaussian_interval(std::get<GaussianParams>(params), c);
  } else {
    bounds = gamma_interval(std::get<GammaParams>(params), confidence);
  }
  return {bounds.first, bounds.second, confidence};
}

double dapien_predict_point(const DapienModel& model, std::span<const std::uint8_t> x) {
  const DistParams params = dapien_predict_params(model, x);
  if (const auto* g = std::get_if<GaussianParams>(&params)) return g->mean;
  const auto& gamma = std::get<GammaParams>(params);
  return gamma.location + gamma.shape / gamma.rate;
}

DegenerateFilter drop_degenerate_groups(std::span<const Sample> samples, DistFamily family) {
  DegenerateFilter out;
  if (family == DistFamily::Gaussian) {
    out.kept.assign(samples.begin(), samples.end());
    return out;
  }
  const GroupedDataset grouped = group_by_unique_input(samples);
  std::unordered_set<std::string> dropped;
  for (const Group& g : grouped.groups) {
    if (is_degenerate(g.ys, family)) {
      dropped.insert(bit_key(g.x));
      out.dropped.push_back(g.x);
    }
  }
  for (const Sample& s : samples) {
    if (!dropped.contains(bit_key(s.x))) out.kept.push_back(s);
  }
  return out;
}

}  // namespace dapien
