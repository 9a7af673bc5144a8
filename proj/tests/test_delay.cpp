#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "psra/delay.hpp"

#include "oracles.hpp"

using psra::DelayFamily;
using psra::DelaySpec;

namespace {

const std::vector<DelayFamily> kContinuousFamilies{
    DelayFamily::Uniform, DelayFamily::Triangular, DelayFamily::Normal,
    DelayFamily::Exponential};

// Smooth pieces of the density for quadrature.
std::vector<double> density_breakpoints(const DelaySpec& spec) {
  const double s = spec.sigma;
  switch (spec.family) {
    case DelayFamily::Uniform: {
      const double h = s * std::numbers::sqrt3;
      return {-h, 0.0, h};
    }
    case DelayFamily::Triangular: {
      const double h = s * std::sqrt(6.0);
      return {-h, 0.0, h};
    }
    case DelayFamily::Normal: {
      const double b = s * psra::normal_upper_quantile(1e-16);
      return {-b, 0.0, b};
    }
    case DelayFamily::Exponential:
      return {-s, 0.0, s * (std::log(1e16) - 1.0)};
    default: return {};
  }
}

}  // namespace

TEST_CASE("every family integrates to a zero-mean, sigma-std law") {
  for (auto family : kContinuousFamilies) {
    for (double sigma : {0.5, 1.0, 3.0}) {
      const DelaySpec spec{family, sigma};
      const auto pieces = density_breakpoints(spec);
      const auto f = [&](double t) { return psra::delay_pdf(spec, t); };
      const double mass = oracle::piecewise_simpson(f, pieces);
      const double mean =
          oracle::piecewise_simpson([&](double t) { return t * f(t); }, pieces);
      const double second =
          oracle::piecewise_simpson([&](double t) { return t * t * f(t); }, pieces);
      INFO(psra::to_string(family) << " sigma=" << sigma);
      REQUIRE(std::abs(mass - 1.0) < 1e-9);
      REQUIRE(std::abs(mean) < 1e-9 * sigma);
      REQUIRE(std::abs(std::sqrt(second - mean * mean) - sigma) < 1e-9 * sigma);
    }
  }
}

TEST_CASE("cdf is the antiderivative of the density") {
  for (auto family : kContinuousFamilies) {
    const DelaySpec spec{family, 1.7};
    const auto pieces = density_breakpoints(spec);
    const double lo = pieces.front(), hi = pieces.back();
    const auto f = [&](double t) { return psra::delay_pdf(spec, t); };
    for (int k = 0; k < 100; ++k) {
      const double t = lo + (hi - lo) * (k + 0.5) / 100.0;
      std::vector<double> sub{lo};
      for (double b : pieces)
        if (b > lo && b < t) sub.push_back(b);
      sub.push_back(t);
      const double integral = oracle::piecewise_simpson(f, sub, 2000);
      INFO(psra::to_string(family) << " t=" << t);
      REQUIRE(std::abs(integral - psra::delay_cdf(spec, t)) < 1e-9);
    }
  }
}

TEST_CASE("cdf is monotone with limits 0 and 1") {
  for (auto family : kContinuousFamilies) {
    const DelaySpec spec{family, 2.0};
    double prev = 0.0;
    for (double t = -300.0; t <= 300.0; t += 0.25) {
      const double c = psra::delay_cdf(spec, t);
      REQUIRE(c >= prev);
      prev = c;
    }
    REQUIRE(psra::delay_cdf(spec, -1e12) == 0.0);
    REQUIRE(psra::delay_cdf(spec, 1e12) == 1.0);
  }
}

TEST_CASE("cdf closed-form anchor points") {
  REQUIRE(psra::delay_cdf(DelaySpec::uniform(1.0), 0.0) == 0.5);
  REQUIRE(psra::delay_cdf(DelaySpec::normal(2.0), -20.0) <= 1e-12);
  REQUIRE(psra::delay_cdf(DelaySpec::exponential(1.0), -1.0) == 0.0);
  REQUIRE(psra::delay_cdf(DelaySpec::exponential(1.0), -0.999) > 0.0);
  // degenerate step at 0
  REQUIRE(psra::delay_cdf(DelaySpec::degenerate(), -1e-9) == 0.0);
  REQUIRE(psra::delay_cdf(DelaySpec::degenerate(), 0.0) == 1.0);
}

TEST_CASE("sigma = 0 collapses every family to the point mass") {
  for (auto family : kContinuousFamilies) {
    const DelaySpec spec{family, 0.0};
    psra::Rng rng(5);
    REQUIRE(psra::sample_delay(spec, rng) == 0.0);
    REQUIRE(psra::delay_cdf(spec, -0.1) == 0.0);
    REQUIRE(psra::delay_cdf(spec, 0.1) == 1.0);
  }
}

TEST_CASE("samples respect the support bounds") {
  psra::Rng rng(6);
  const double h3 = std::numbers::sqrt3;
  const double h6 = std::sqrt(6.0);
  for (int k = 0; k < 100'000; ++k) {
    const double u = psra::sample_delay(DelaySpec::uniform(1.0), rng);
    REQUIRE(u >= -h3);
    REQUIRE(u <= h3);
    const double t = psra::sample_delay(DelaySpec::triangular(1.0), rng);
    REQUIRE(t >= -h6);
    REQUIRE(t <= h6);
    REQUIRE(psra::sample_delay(DelaySpec::exponential(1.0), rng) >= -1.0);
  }
}

TEST_CASE("exponential delays have mean 0 to CLT accuracy") {
  psra::Rng rng(7);
  const DelaySpec spec = DelaySpec::exponential(1.0);
  double acc = 0.0;
  const int n = 1'000'000;
  for (int k = 0; k < n; ++k) acc += psra::sample_delay(spec, rng);
  REQUIRE(std::abs(acc / n) < 0.005);  // ~ 3 sigma / sqrt(n) with headroom
}

TEST_CASE("sample moments match the spec for every family") {
  for (auto family : kContinuousFamilies) {
    psra::Rng rng(8);
    const DelaySpec spec{family, 2.5};
    std::vector<double> xs(200'000);
    for (auto& x : xs) x = psra::sample_delay(spec, rng);
    INFO(psra::to_string(family));
    REQUIRE(oracle::mean(xs) == Catch::Approx(0.0).margin(0.05));
    REQUIRE(oracle::sample_std(xs) == Catch::Approx(2.5).epsilon(0.02));
  }
}

TEST_CASE("validation rejects bad specs") {
  REQUIRE_THROWS_AS(DelaySpec::uniform(-1.0).validate(), std::invalid_argument);
  REQUIRE_THROWS_AS((DelaySpec{DelayFamily::Degenerate, 1.0}.validate()),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(psra::delay_pdf(DelaySpec::degenerate(), 0.0), std::domain_error);
  REQUIRE_THROWS_AS(psra::delay_tail_halfwidth(DelaySpec::uniform(1.0), 0.0),
                    std::invalid_argument);
}

TEST_CASE("tail halfwidth bounds the tail mass by eps") {
  for (auto family : kContinuousFamilies) {
    const DelaySpec spec{family, 1.3};
    for (double eps : {1e-6, 1e-12}) {
      const double b = psra::delay_tail_halfwidth(spec, eps);
      REQUIRE(psra::delay_cdf(spec, -b) <= eps);
      REQUIRE(1.0 - psra::delay_cdf(spec, b) <= eps * (1.0 + 1e-9));
    }
  }
}
