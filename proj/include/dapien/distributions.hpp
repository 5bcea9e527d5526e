#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <variant>

namespace dapien {

struct GaussianParams {
  double mean = 0.0;
  double variance = 0.0;
};

/// Three-parameter gamma with density
///   rate^shape / Gamma(shape) * (t - location)^(shape - 1) * exp(-rate * (t - location))
/// for t > location.
struct GammaParams {
  double shape = 1.0;
  double rate = 1.0;
  double location = 0.0;
};

enum class DistFamily { Gaussian, Gamma };

using DistParams = std::variant<GaussianParams, GammaParams>;

std::string_view to_string(DistFamily family);
DistFamily parse_family(std::string_view name);
DistFamily family_of(const DistParams& params);
void validate(const GammaParams& params);

/// Sample mean and unbiased (n - 1) variance. Singletons and constant
/// groups yield variance exactly 0.
GaussianParams fit_gaussian(std::span<const double> ys);

/// Maximum-likelihood three-parameter gamma fit.
///
/// The location is chosen by maximizing the profile likelihood over
/// location < min(ys) - gap, where gap = max((mean - min) / n, 1e-9) is the
/// expected spacing of the sample minimum under a unit-shape fit. Shape and
/// rate at each trial location come from Newton iteration on
/// log(shape) - digamma(shape) = log(mean z) - mean(log z), falling back to
/// the method of moments if Newton fails. The final shape gets the usual
/// first-order small-sample correction (n - 3) / n * shape + 2 / (3n) with
/// the rate rescaled so the fitted mean is preserved.
///
/// Throws EmptyGroup for no data and DegenerateGroup for n < 3 or zero spread.
GammaParams fit_gamma(std::span<const double> ys);

double gamma_pdf(double z, const GammaParams& params);
double gamma_cdf(double z, const GammaParams& params);

/// Inverts gamma_cdf by bracketing plus safeguarded Newton/bisection on the
/// regularized incomplete gamma function. Result satisfies
/// |gamma_cdf(z) - p| <= 1e-10.
double gamma_inverse_cdf(double p, const GammaParams& params);

/// Two-sided Student-t critical value c with P(|T_ndf| <= c) = confidence.
/// ndf may be non-integer.
double t_quantile(double confidence, double ndf);

std::pair<double, double> gaussian_interval(const GaussianParams& params, double c);
std::pair<double, double> gamma_interval(const GammaParams& params, double confidence);

}  // namespace dapien
