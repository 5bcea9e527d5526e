#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "dapien/dapien.hpp"
#include "dapien/error.hpp"
#include "dapien/random.hpp"
#include "dapien/serialization.hpp"
#include "dapien/synthdata.hpp"
#include "oracles.hpp"

using namespace dapien;
using doctest::Approx;

namespace {

constexpr double kT95Ndf20 = 2.085963447266;

int bit_sum(const BitVector& x) { return static_cast<int>(std::count(x.begin(), x.end(), 1)); }

LinearModel constant(double value, Activation act, std::size_t d) {
  return {std::vector<double>(d, 0.0), act == Activation::Identity ? value : std::log(value), act};
}

DapienModel gaussian_model(double mean, double sigma, double ndf, std::size_t d = 3) {
  return {DistFamily::Gaussian,
          {constant(mean, Activation::Identity, d), constant(sigma, Activation::Exponential, d)},
          ndf};
}

DapienModel gamma_model(double shape, double rate, double location, std::size_t d = 3) {
  return {DistFamily::Gamma,
          {constant(shape, Activation::Exponential, d), constant(rate, Activation::Exponential, d),
           constant(location, Activation::Identity, d)},
          std::nullopt};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Split dataset_split(char name) {
  const auto samples = generate(dataset_spec(name, 42));
  return group_split(samples, SplitSpec{});
}

}  // namespace

TEST_CASE("fixed gaussian model interval") {
  const auto model = gaussian_model(5.0, 0.2, 20.0);
  const auto pi = dapien_predict_interval(model, BitVector{0, 1, 0}, 0.95);
  CHECK(pi.lower == Approx(5.0 - kT95Ndf20 * 0.2).epsilon(1e-9));
  CHECK(pi.upper == Approx(5.0 + kT95Ndf20 * 0.2).epsilon(1e-9));
  CHECK(pi.lower == Approx(4.5828).epsilon(1e-4));
  CHECK(pi.upper == Approx(5.4172).epsilon(1e-4));
  CHECK(pi.confidence == 0.95);
}

TEST_CASE("fixed gamma model interval") {
  const auto model = gamma_model(1.0, 1.0, 10.0);
  const auto pi = dapien_predict_interval(model, BitVector{1, 1, 0}, 0.95);
  CHECK(pi.lower == Approx(10.0 - std::log(0.975)).epsilon(1e-10));
  CHECK(pi.upper == Approx(10.0 - std::log(0.025)).epsilon(1e-10));
  CHECK(pi.lower == Approx(10.0253).epsilon(1e-5));
  CHECK(pi.upper == Approx(13.6889).epsilon(1e-5));
}

TEST_CASE("point predictions") {
  CHECK(dapien_predict_point(gaussian_model(5.0, 0.3, 20.0), BitVector{1, 0, 0}) == Approx(5.0));
  CHECK(dapien_predict_point(gamma_model(1.0, 1.0, 10.0), BitVector{0, 0, 0}) == Approx(11.0));
  CHECK(dapien_predict_point(gamma_model(4.0, 2.0, 0.0), BitVector{0, 0, 1}) == Approx(2.0));
}

TEST_CASE("prediction errors") {
  const auto model = gaussian_model(5.0, 0.2, 20.0);
  try {
    dapien_predict_interval(model, BitVector{1, 0}, 0.95);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
  for (double bad : {0.0, 1.0, -0.5, 1.5}) {
    try {
      dapien_predict_interval(model, BitVector{1, 0, 0}, bad);
      FAIL("expected DomainError");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DomainError);
    }
  }
}

TEST_CASE("intervals nest as confidence grows") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = gaussian_model(rng.normal(0, 5), 0.01 + rng.exponential(), 1.0 + 10.0 * rng.exponential());
    const auto m = gamma_model(0.3 + 2.0 * rng.exponential(), 0.2 + rng.exponential(), rng.normal(0, 5));
    for (const auto* model : {&g, &m}) {
      const BitVector x{1, 0, 1};
      const double levels[] = {0.5, 0.8, 0.9, 0.95, 0.99};
      for (int i = 0; i + 1 < 5; ++i) {
        const auto inner = dapien_predict_interval(*model, x, levels[i]);
        const auto outer = dapien_predict_interval(*model, x, levels[i + 1]);
        CHECK(outer.lower < inner.lower);
        CHECK(outer.upper > inner.upper);
        CHECK(inner.lower <= inner.upper);
      }
      const double point = dapien_predict_point(*model, x);
      if (model == &g) {
        const auto pi = dapien_predict_interval(*model, x, 0.9);
        CHECK(point - pi.lower == Approx(pi.upper - point).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("gamma interval contains the predicted point near unit shape") {
  for (double shape : {0.8, 0.9, 1.0, 1.1, 1.25}) {
    for (double rate : {0.1, 1.0, 7.0}) {
      const auto model = gamma_model(shape, rate, -2.0);
      const auto pi = dapien_predict_interval(model, BitVector{0, 0, 0}, 0.95);
      const double point = dapien_predict_point(model, BitVector{0, 0, 0});
      CHECK(pi.lower <= point);
      CHECK(point <= pi.upper);
    }
  }
}

TEST_CASE("intervals from true parameters cover at the nominal rate") {
  const int n = 100000;
  for (double conf : {0.9, 0.95}) {
    SUBCASE("gaussian") {
      Rng rng(101);
      const GaussianParams params{3.0, 0.25};
      const auto [lo, hi] = gaussian_interval(params, t_quantile(conf, 1e6));
      int hits = 0;
      for (int i = 0; i < n; ++i) {
        const double y = rng.normal(3.0, 0.5);
        hits += (y >= lo && y <= hi);
      }
      CHECK(std::abs(100.0 * hits / n - 100.0 * conf) <= 1.5);
    }
    SUBCASE("gamma") {
      Rng rng(202);
      const GammaParams params{1.0, 1.0 / 7.0, 7.0};  // f(x) = 7 under the scaled-gamma generator
      const auto [lo, hi] = gamma_interval(params, conf);
      // Cross-check against the quadrature oracle.
      CHECK(lo == Approx(oracle::gamma_quantile((1.0 - conf) / 2.0, 1.0, 1.0 / 7.0, 7.0)).epsilon(1e-7));
      CHECK(hi == Approx(oracle::gamma_quantile((1.0 + conf) / 2.0, 1.0, 1.0 / 7.0, 7.0)).epsilon(1e-7));
      int hits = 0;
      for (int i = 0; i < n; ++i) {
        const double y = 7.0 + 7.0 * rng.gamma(1.0, 1.0);
        hits += (y >= lo && y <= hi);
      }
      CHECK(std::abs(100.0 * hits / n - 100.0 * conf) <= 1.5);
    }
  }
}

TEST_CASE("gaussian fit on dataset A recovers the bit sum") {
  const auto split = dataset_split('A');
  TrainConfig config;
  config.seed = 42;
  const auto model = dapien_fit(split.train, DistFamily::Gaussian, config);
  REQUIRE(model.param_models.size() == 2);
  REQUIRE(model.ndf.has_value());
  CHECK(*model.ndf == Approx(20.0));
  for (double w : model.param_models[0].weights) CHECK(w == Approx(1.0).epsilon(0.02));
  CHECK(std::abs(model.param_models[0].bias) < 0.05);
  CHECK(model.param_models[1].activation == Activation::Exponential);
}

TEST_CASE("constant targets give degenerate intervals") {
  std::vector<Sample> samples;
  for (int v = 0; v < 16; ++v) {
    BitVector x(4);
    for (int j = 0; j < 4; ++j) x[j] = static_cast<std::uint8_t>((v >> j) & 1);
    for (int r = 0; r < 5; ++r) samples.push_back({x, 5.0});
  }
  const auto model = dapien_fit(samples, DistFamily::Gaussian, TrainConfig{});
  for (double conf : {0.5, 0.95, 0.999}) {
    for (const auto& s : samples) {
      const auto pi = dapien_predict_interval(model, s.x, conf);
      CHECK(pi.lower == Approx(5.0).epsilon(1e-6));
      CHECK(pi.upper == Approx(5.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("gamma fit on dataset C tracks the generator") {
  const auto split = dataset_split('C');
  const auto filtered = drop_degenerate_groups(split.train, DistFamily::Gamma);
  CHECK(filtered.dropped.size() <= 1);  // only the all-zero input is constant
  TrainConfig config;
  config.seed = 42;
  const auto model = dapien_fit(filtered.kept, DistFamily::Gamma, config);
  REQUIRE(model.param_models.size() == 3);
  CHECK_FALSE(model.ndf.has_value());

  std::map<std::string, BitVector> test_inputs;
  for (const auto& s : split.test) test_inputs.emplace(bit_key(s.x), s.x);
  std::vector<double> loc_err;
  std::vector<double> shape_err;
  for (const auto& [key, x] : test_inputs) {
    const int f = bit_sum(x);
    if (f == 0) continue;
    const auto params = std::get<GammaParams>(dapien_predict_params(model, x));
    loc_err.push_back(std::abs(params.location - f) / f);
    shape_err.push_back(std::abs(params.shape - 1.0));
  }
  REQUIRE(loc_err.size() > 100);
  CHECK(median(loc_err) < 0.15);
  CHECK(median(shape_err) < 0.15);
}

TEST_CASE("gamma fit rejects degenerate groups") {
  std::vector<Sample> samples{{{0}, 1.0}, {{0}, 1.0}, {{0}, 1.0}, {{1}, 2.0}, {{1}, 3.0}, {{1}, 5.0}};
  CHECK_THROWS_AS(dapien_fit(samples, DistFamily::Gamma, TrainConfig{}), Error);
  const auto filtered = drop_degenerate_groups(samples, DistFamily::Gamma);
  CHECK(filtered.kept.size() == 3);
  REQUIRE(filtered.dropped.size() == 1);
  CHECK(filtered.dropped[0] == BitVector{0});
  CHECK(drop_degenerate_groups(samples, DistFamily::Gaussian).kept.size() == samples.size());
}

TEST_CASE("fitting is deterministic and survives a JSON round trip") {
  const auto split = dataset_split('B');
  TrainConfig config;
  config.seed = 9;
  const auto a = dapien_fit(split.train, DistFamily::Gaussian, config);
  const auto b = dapien_fit(split.train, DistFamily::Gaussian, config);
  const auto c = dapien_model_from_json(nlohmann::json::parse(to_json(a).dump()));
  CHECK(to_json(a) == to_json(b));
  CHECK(to_json(a) == to_json(c));
  for (const auto& s : split.test) {
    const auto pa = dapien_predict_interval(a, s.x, 0.95);
    const auto pc = dapien_predict_interval(c, s.x, 0.95);
    CHECK(pa.lower == pc.lower);
    CHECK(pa.upper == pc.upper);
  }
}

TEST_CASE("model validation") {
  auto model = gaussian_model(1.0, 1.0, 20.0);
  CHECK_NOTHROW(validate(model));
  model.ndf.reset();
  CHECK_THROWS_AS(validate(model), Error);
  auto g = gamma_model(1.0, 1.0, 0.0);
  g.param_models.pop_back();
  CHECK_THROWS_AS(validate(g), Error);
}
