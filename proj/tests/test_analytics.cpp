#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "psra/analytics.hpp"

#include "oracles.hpp"

using psra::ArrivalStream;
using psra::DelayFamily;
using psra::DelaySpec;
using psra::Interval;
using psra::ProcessSpec;
using psra::SlotPair;

namespace {

// Independent covariance oracle for uniform delays: its own cdf, direct sum
// over i in [-25, 25].
double covariance_oracle_uniform(double sigma, double lambda, double gamma, double t,
                                 double T) {
  const double h = sigma * std::sqrt(3.0);
  const auto F = [&](double x) {
    if (x <= -h) return 0.0;
    if (x >= h) return 1.0;
    return (x + h) / (2.0 * h);
  };
  double acc = 0.0;
  for (int i = -25; i <= 25; ++i) {
    const double s = i / lambda;
    const double p1 = gamma * (F(t + T - s) - F(t - s));
    const double p2 = gamma * (F(t + 2.0 * T - s) - F(t + T - s));
    acc += p1 * p2;
  }
  return -acc;
}

ProcessSpec spec_on(double lambda, DelaySpec delay, double gamma, Interval horizon) {
  return ProcessSpec{lambda, delay, gamma, horizon};
}

}  // namespace

TEST_CASE("arrival probability with degenerate delays is a slot indicator") {
  const auto spec = spec_on(2.0, DelaySpec::degenerate(), 1.0, {0.0, 10.0});
  // index 3 is scheduled at 1.5
  REQUIRE(psra::arrival_probability(spec, 3, 1.0, 2.0) == 1.0);
  REQUIRE(psra::arrival_probability(spec, 3, 1.5, 2.0) == 0.0);  // left edge excluded
  REQUIRE(psra::arrival_probability(spec, 3, 1.0, 1.5) == 1.0);  // right edge included
  REQUIRE(psra::arrival_probability(spec, 3, 2.0, 3.0) == 0.0);
  REQUIRE(psra::arrival_probability(spec, 3, 1.2, 1.2) == 0.0);  // null interval
}

TEST_CASE("arrival probability covers the full uniform support") {
  const double sigma = 1.4;
  const auto spec = spec_on(1.0, DelaySpec::uniform(sigma), 1.0, {0.0, 1.0});
  const double h = sigma * std::sqrt(3.0);
  REQUIRE(psra::arrival_probability(spec, 0, -h, h) == 1.0);
  REQUIRE(psra::arrival_probability(spec, 0, -h, 0.0) == 0.5);
}

TEST_CASE("arrival probability scales linearly in gamma") {
  const auto full = spec_on(1.0, DelaySpec::normal(2.0), 1.0, {0.0, 1.0});
  auto thinned = full;
  thinned.gamma = 0.37;
  REQUIRE(psra::arrival_probability(thinned, 2, 0.0, 1.0) ==
          Catch::Approx(0.37 * psra::arrival_probability(full, 2, 0.0, 1.0))
              .margin(1e-15));
}

TEST_CASE("expected count telescopes to gamma * k over k/lambda windows") {
  for (auto family : {DelayFamily::Uniform, DelayFamily::Triangular, DelayFamily::Normal,
                      DelayFamily::Exponential}) {
    for (double lambda : {1.0, 2.5}) {
      for (double sigma_mult : {1.0, 20.0}) {
        for (double gamma : {1.0, 0.5}) {
          const auto spec = spec_on(lambda, DelaySpec{family, sigma_mult / lambda}, gamma,
                                    {0.0, 1.0});
          for (int k : {1, 2, 5}) {
            const double t1 = 0.37;  // arbitrary anchor; the identity is shift-free
            const double count = psra::expected_count(spec, t1, t1 + k / lambda);
            INFO(psra::to_string(family) << " lambda=" << lambda << " sigma*lambda="
                                         << sigma_mult << " gamma=" << gamma << " k=" << k);
            REQUIRE(std::abs(count - gamma * k) < 1e-9);
          }
        }
      }
    }
  }
}

TEST_CASE("expected count is exactly linear in gamma") {
  const auto full = spec_on(1.0, DelaySpec::uniform(2.0), 1.0, {0.0, 1.0});
  auto half = full;
  half.gamma = 0.5;
  REQUIRE(psra::expected_count(half, 0.2, 3.7) ==
          Catch::Approx(0.5 * psra::expected_count(full, 0.2, 3.7)).margin(1e-15));
  REQUIRE(psra::expected_count(full, 1.3, 1.3) == 0.0);
}

TEST_CASE("analytic covariance: degenerate schedule decouples aligned slots") {
  const auto spec = spec_on(1.0, DelaySpec::degenerate(), 1.0, {0.0, 2.0});
  REQUIRE(psra::analytic_covariance(spec, SlotPair{0.0, 1.0}) == 0.0);
}

TEST_CASE("analytic covariance is nonpositive and vanishes for large sigma") {
  const SlotPair slots{0.0, 1.0};
  double prev = -1e9;
  for (double sigma : {1.0, 5.0, 100.0}) {
    const auto spec = spec_on(1.0, DelaySpec::uniform(sigma), 1.0, {0.0, 2.0});
    const double cov = psra::analytic_covariance(spec, slots);
    REQUIRE(cov <= 0.0);
    if (prev != -1e9) REQUIRE(std::abs(cov) < std::abs(prev));
    prev = cov;
  }
}

TEST_CASE("analytic covariance nonpositive across families and slots") {
  psra::Rng pick(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto family = static_cast<DelayFamily>(pick() % 4);
    const double sigma = 0.2 + 4.0 * pick.uniform01();
    const double gamma = 0.3 + 0.7 * pick.uniform01();
    const SlotPair slots{-3.0 + 6.0 * pick.uniform01(), 0.2 + 2.5 * pick.uniform01()};
    const auto spec =
        spec_on(0.5 + 2.0 * pick.uniform01(), DelaySpec{family, sigma}, gamma,
                {slots.first_lo(), slots.second_hi()});
    REQUIRE(psra::analytic_covariance(spec, slots) <= 0.0);
  }
}

TEST_CASE("analytic covariance against the independent uniform oracle") {
  const double sigma = 2.0, lambda = 1.0, gamma = 1.0;
  const SlotPair slots{0.0, 1.0};
  const auto spec = spec_on(lambda, DelaySpec::uniform(sigma), gamma, {0.0, 2.0});
  const double value = psra::analytic_covariance(spec, slots);
  const double from_oracle = covariance_oracle_uniform(sigma, lambda, gamma, 0.0, 1.0);
  REQUIRE(value == Catch::Approx(from_oracle).margin(1e-12));
  // frozen closed form: -(4 sqrt(3) - 1) / 48
  REQUIRE(value ==
          Catch::Approx(-(4.0 * std::sqrt(3.0) - 1.0) / 48.0).margin(1e-12));
}

TEST_CASE("thinning enters the covariance as gamma squared") {
  const SlotPair slots{0.0, 1.0};
  const auto full = spec_on(1.0, DelaySpec::uniform(2.0), 1.0, {0.0, 2.0});
  auto thinned = full;
  thinned.gamma = 0.5;
  REQUIRE(psra::analytic_covariance(thinned, slots) ==
          Catch::Approx(0.25 * psra::analytic_covariance(full, slots)).margin(1e-15));
}

TEST_CASE("empirical covariance of constant counts is exactly zero") {
  std::vector<ArrivalStream> streams(3);
  for (auto& s : streams) {
    s.epochs = {0.5, 1.5};
    s.source_index = {1, 2};
    s.spec.horizon = {0.0, 2.0};
  }
  const auto est = psra::empirical_covariance(streams, SlotPair{0.0, 1.0});
  REQUIRE(est.estimate == 0.0);
  REQUIRE(est.std_error == 0.0);
}

TEST_CASE("empirical covariance needs two replications and a covering horizon") {
  std::vector<ArrivalStream> one(1);
  one[0].spec.horizon = {0.0, 2.0};
  REQUIRE_THROWS_AS(psra::empirical_covariance(one, SlotPair{0.0, 1.0}),
                    std::invalid_argument);
  std::vector<ArrivalStream> short_h(2);
  for (auto& s : short_h) s.spec.horizon = {0.0, 1.5};
  REQUIRE_THROWS_AS(psra::empirical_covariance(short_h, SlotPair{0.0, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("poisson slot counts are uncorrelated") {
  const int reps = 4000;
  std::vector<ArrivalStream> streams(reps);
  for (int r = 0; r < reps; ++r)
    streams[r] = psra::generate_poisson(1.0, Interval{0.0, 4.0}, 717, r);
  const auto est = psra::empirical_covariance(streams, SlotPair{0.0, 2.0});
  REQUIRE(std::abs(est.estimate) <= 3.0 * est.std_error);
}

TEST_CASE("empirical covariance agrees with the analytic sum") {
  const SlotPair slots{0.0, 1.0};
  const auto run = [&](double sigma, double gamma, std::uint64_t seed) {
    const auto spec = spec_on(1.0, DelaySpec::uniform(sigma), gamma, {0.0, 2.0});
    const int reps = 20'000;
    std::vector<ArrivalStream> streams(reps);
    for (int r = 0; r < reps; ++r) streams[r] = psra::generate_psra(spec, seed, r);
    const auto est = psra::empirical_covariance(streams, slots);
    const double analytic = psra::analytic_covariance(spec, slots);
    INFO("sigma=" << sigma << " gamma=" << gamma << " analytic=" << analytic
                  << " empirical=" << est.estimate << " se=" << est.std_error);
    REQUIRE(std::abs(est.estimate - analytic) <= 3.0 * est.std_error);
  };
  run(2.0, 1.0, 818);   // the paper's unthinned formula
  run(1.5, 0.5, 919);   // thinned variant exercises the gamma^2 factor
}

TEST_CASE("count pmf and poisson tv helpers") {
  std::vector<ArrivalStream> streams(4);
  for (std::size_t r = 0; r < 4; ++r) {
    streams[r].epochs.assign(r, 0.5);  // r epochs inside (0, 1]
    streams[r].source_index.assign(r, 1);
    streams[r].spec.horizon = {0.0, 1.0};
  }
  const auto pmf = psra::count_pmf(streams, 0.0, 1.0);
  REQUIRE(pmf == std::vector<double>{0.25, 0.25, 0.25, 0.25});

  // all mass on count 1 vs Poisson(1): TV = 1 - e^{-1}, no sampling noise
  const auto tv = psra::tv_to_poisson({0.0, 1.0}, 1.0, 1000);
  REQUIRE(tv.tv == Catch::Approx(1.0 - std::exp(-1.0)).margin(1e-12));
  REQUIRE(tv.std_error == 0.0);
}
