#include "dapien/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "dapien/error.hpp"
#include "dapien/special_functions.hpp"

namespace dapien {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool all_equal(std::span<const double> ys) {
  return std::all_of(ys.begin(), ys.end(), [&](double y) { return y == ys.front(); });
}

double mean_of(std::span<const double> ys) {
  return std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
}

struct ShapeRate {
  double shape;
  double rate;
};

// Shape/rate for data already shifted to be strictly positive.
// mean_z and mean_log_z summarize the shifted sample.
bool shape_rate_mle(double mean_z, double mean_log_z, ShapeRate& out) {
  const double s = std::log(mean_z) - mean_log_z;
  if (!(s > 0.0) || !std::isfinite(s)) return false;
  double a = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
  for (int i = 0; i < 100; ++i) {
    const double g = std::log(a) - special::digamma(a) - s;
    const double dg = 1.0 / a - special::trigamma(a);
    double next = a - g / dg;
    if (!(next > 0.0)) next = 0.5 * a;
    if (std::abs(next - a) <= 1e-12 * a) {
      a = next;
      out = {a, a / mean_z};
      return std::isfinite(a) && a > 0.0;
    }
    a = next;
  }
  return false;
}

bool shape_rate_moments(std::span<const double> ys, double location, ShapeRate& out) {
  double mean = 0.0;
  for (double y : ys) mean += y - location;
  mean /= static_cast<double>(ys.size());
  double ss = 0.0;
  for (double y : ys) ss += (y - location - mean) * (y - location - mean);
  const double var = ss / static_cast<double>(ys.size() - 1);
  if (!(var > 0.0) || !(mean > 0.0)) return false;
  out = {mean * mean / var, mean / var};
  return std::isfinite(out.shape) && std::isfinite(out.rate);
}

struct ProfilePoint {
  double loglik = kNegInf;  // per observation
  ShapeRate params{1.0, 1.0};
  bool mle = false;
};

ProfilePoint profile_at(std::span<const double> ys, double sample_mean, double location) {
  double sum_log = 0.0;
  for (double y : ys) sum_log += std::log(y - location);
  const double mean_log = sum_log / static_cast<double>(ys.size());
  const double mean_z = sample_mean - location;
  ProfilePoint point;
  if (shape_rate_mle(mean_z, mean_log, point.params)) {
    point.mle = true;
  } else if (!shape_rate_moments(ys, location, point.params)) {
    return point;
  }
  const double a = point.params.shape;
  const double b = point.params.rate;
  point.loglik = a * std::log(b) - std::lgamma(a) + (a - 1.0) * mean_log - b * mean_z;
  if (!std::isfinite(point.loglik)) point.loglik = kNegInf;
  return point;
}

// Small-sample shape correction; the rate is rescaled to keep the mean.
GammaParams corrected_fit(const ShapeRate& mle, double location, double n) {
  const double corrected = (n - 3.0) / n * mle.shape + 2.0 / (3.0 * n);
  GammaParams fitted{corrected, mle.rate * corrected / mle.shape, location};
  if (!(fitted.shape > 0.0) || !(fitted.rate > 0.0) || !std::isfinite(fitted.shape) ||
      !std::isfinite(fitted.rate)) {
    throw Error(ErrorKind::NonConvergence, "gamma fit produced invalid parameters");
  }
  return fitted;
}

}  // namespace

std::string_view to_string(DistFamily family) {
  return family == DistFamily::Gaussian ? "gaussian" : "gamma";
}

DistFamily parse_family(std::string_view name) {
  if (name == "gaussian" || name == "Gaussian") return DistFamily::Gaussian;
  if (name == "gamma" || name == "Gamma") return DistFamily::Gamma;
  throw Error(ErrorKind::ConfigError, "unknown distribution family '" + std::string(name) + "'");
}

DistFamily family_of(const DistParams& params) {
  return std::holds_alternative<GaussianParams>(params) ? DistFamily::Gaussian
                                                       : DistFamily::Gamma;
}

void validate(const GammaParams& params) {
  if (!(params.shape > 0.0) || !(params.rate > 0.0) || !std::isfinite(params.shape) ||
      !std::isfinite(params.rate) || !std::isfinite(params.location)) {
    throw Error(ErrorKind::DomainError, "gamma parameters require shape > 0, rate > 0, finite location");
  }
}

GaussianParams fit_gaussian(std::span<const double> ys) {
  if (ys.empty()) throw Error(ErrorKind::EmptyGroup, "cannot fit a Gaussian to no data");
  if (ys.size() == 1 || all_equal(ys)) return {ys.front(), 0.0};
  const double mean = mean_of(ys);
  double ss = 0.0;
  for (double y : ys) ss += (y - mean) * (y - mean);
  return {mean, ss / static_cast<double>(ys.size() - 1)};
}

GammaParams fit_gamma(std::span<const double> ys) {
  if (ys.empty()) throw Error(ErrorKind::EmptyGroup, "cannot fit a gamma to no data");
  if (ys.size() < 3) {
    throw Error(ErrorKind::DegenerateGroup,
                "gamma fit needs at least 3 values, got " + std::to_string(ys.size()));
  }
  if (all_equal(ys)) throw Error(ErrorKind::DegenerateGroup, "gamma fit on a zero-spread group");

  const auto n = static_cast<double>(ys.size());
  const auto [min_it, max_it] = std::minmax_element(ys.begin(), ys.end());
  const double lo = *min_it;
  const double range = *max_it - lo;
  const double mean = mean_of(ys);

  const double gap_min = std::max((mean - lo) / n, 1e-9);
  const double gap_max = std::max(10.0 * range, 10.0 * gap_min);

  // Coarse log-spaced scan of the gap below the sample minimum, then a
  // golden-section refinement around the best grid point.
  constexpr int kGrid = 200;
  const double log_lo = std::log(gap_min);
  const double log_step = (std::log(gap_max) - log_lo) / (kGrid - 1);
  auto profile_log_gap = [&](double log_gap) {
    return profile_at(ys, mean, lo - std::exp(log_gap));
  };

  int best = 0;
  double best_ll = kNegInf;
  for (int i = 0; i < kGrid; ++i) {
    const double ll = profile_log_gap(log_lo + i * log_step).loglik;
    if (ll > best_ll) {
      best_ll = ll;
      best = i;
    }
  }
  if (best_ll == kNegInf) {
    throw Error(ErrorKind::NonConvergence, "gamma fit failed at every trial location");
  }

  double a = log_lo + std::max(best - 1, 0) * log_step;
  double b = log_lo + std::min(best + 1, kGrid - 1) * log_step;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = profile_log_gap(c).loglik;
  double fd = profile_log_gap(d).loglik;
  for (int i = 0; i < 100 && (b - a) > 1e-12; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = profile_log_gap(c).loglik;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = profile_log_gap(d).loglik;
    }
  }
  double log_gap = 0.5 * (a + b);
  ProfilePoint refined = profile_log_gap(log_gap);
  const double grid_log_gap = log_lo + best * log_step;
  if (refined.loglik < best_ll) {
    log_gap = grid_log_gap;
    refined = profile_log_gap(log_gap);
  }

  if (std::exp(log_gap) > range) {
    // The optimum drifted further below the minimum than the data spans,
    // the likelihood creeping toward its normal limit. Use a fixed offset
    // of 1% of the range instead.
    const double gap = std::max(0.01 * range, 1e-9);
    const ProfilePoint fixed = profile_at(ys, mean, lo - gap);
    if (fixed.loglik == kNegInf) {
      throw Error(ErrorKind::NonConvergence, "gamma fit failed at the fallback location");
    }
    return corrected_fit(fixed.params, lo - gap, n);
  }
  return corrected_fit(refined.params, lo - std::exp(log_gap), n);
}

double gamma_pdf(double z, const GammaParams& params) {
  const double t = z - params.location;
  if (t <= 0.0) return 0.0;
  const double a = params.shape;
  const double b = params.rate;
  return std::exp(a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(t) - b * t);
}

double gamma_cdf(double z, const GammaParams& params) {
  validate(params);
  const double t = z - params.location;
  if (t <= 0.0) return 0.0;
  return special::gamma_p(params.shape, params.rate * t);
}

double gamma_inverse_cdf(double p, const GammaParams& params) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorKind::DomainError, "gamma_inverse_cdf needs p in (0, 1), got " + std::to_string(p));
  }
  validate(params);
  const double a = params.shape;

  // Work on the unit-rate, zero-location variable u; z = location + u / rate.
  double lo = 0.0;
  double hi = std::max(a, 1.0);
  while (special::gamma_p(a, hi) < p) {
    lo = hi;
    hi *= 2.0;
  }
  const double log_norm = -std::lgamma(a);
  double u = 0.5 * (lo + hi);
  for (int i = 0; i < 500; ++i) {
    const double f = special::gamma_p(a, u) - p;
    if (std::abs(f) <= 1e-14) break;
    if (f < 0.0) {
      lo = u;
    } else {
      hi = u;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    const double density = std::exp(log_norm + (a - 1.0) * std::log(u) - u);
    double next = u - f / density;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    u = next;
  }
  return params.location + u / params.rate;
}

double t_quantile(double confidence, double ndf) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorKind::DomainError, "confidence must lie in (0, 1)");
  }
  if (!(ndf >= 1.0) || !std::isfinite(ndf)) {
    throw Error(ErrorKind::DomainError, "t_quantile needs ndf >= 1");
  }
  const double p = 0.5 * (1.0 + confidence);
  double lo = 0.0;
  double hi = 2.0;
  while (special::student_t_cdf(hi, ndf) < p) {
    lo = hi;
    hi *= 2.0;
  }
  double t = 0.5 * (lo + hi);
  for (int i = 0; i < 500; ++i) {
    const double f = special::student_t_cdf(t, ndf) - p;
    if (std::abs(f) <= 1e-15) break;
    if (f < 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    double next = t - f / special::student_t_pdf(t, ndf);
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    t = next;
  }
  return t;
}

std::pair<double, double> gaussian_interval(const GaussianParams& params, double c) {
  if (!(c >= 0.0)) throw Error(ErrorKind::DomainError, "critical value must be nonnegative");
  if (!(params.variance >= 0.0)) throw Error(ErrorKind::DomainError, "variance must be nonnegative");
  const double half = c * std::sqrt(params.variance);
  return {params.mean - half, params.mean + half};
}

std::pair<double, double> gamma_interval(const GammaParams& params, double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorKind::DomainError, "confidence must lie in (0, 1)");
  }
  return {gamma_inverse_cdf(0.5 * (1.0 - confidence), params),
          gamma_inverse_cdf(0.5 * (1.0 + confidence), params)};
}

}  // namespace dapien
