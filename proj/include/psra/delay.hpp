#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "psra/rng.hpp"

namespace psra {

enum class DelayFamily { Uniform, Triangular, Normal, Exponential, Degenerate };

inline const char* to_string(DelayFamily f) {
  switch (f) {
    case DelayFamily::Uniform: return "uniform";
    case DelayFamily::Triangular: return "triangular";
    case DelayFamily::Normal: return "normal";
    case DelayFamily::Exponential: return "exponential";
    case DelayFamily::Degenerate: return "degenerate";
  }
  return "?";
}

inline DelayFamily delay_family_from_string(const std::string& s) {
  if (s == "uniform") return DelayFamily::Uniform;
  if (s == "triangular") return DelayFamily::Triangular;
  if (s == "normal") return DelayFamily::Normal;
  if (s == "exponential") return DelayFamily::Exponential;
  if (s == "degenerate") return DelayFamily::Degenerate;
  throw std::invalid_argument("unknown delay family: " + s);
}

// Law of the schedule perturbation: mean 0, standard deviation sigma.
// Each family is the unique zero-mean member with the given sigma:
//   Uniform      on [-sigma*sqrt(3), sigma*sqrt(3)]
//   Triangular   symmetric on [-sigma*sqrt(6), sigma*sqrt(6)], mode 0
//   Normal       N(0, sigma^2)
//   Exponential  E - sigma with E ~ Exp(mean sigma); support [-sigma, inf)
//   Degenerate   point mass at 0 (the deterministic-schedule limit)
// sigma == 0 collapses every family to the Degenerate law.
struct DelaySpec {
  DelayFamily family = DelayFamily::Degenerate;
  double sigma = 0.0;

  static DelaySpec uniform(double s) { return {DelayFamily::Uniform, s}; }
  static DelaySpec triangular(double s) { return {DelayFamily::Triangular, s}; }
  static DelaySpec normal(double s) { return {DelayFamily::Normal, s}; }
  static DelaySpec exponential(double s) { return {DelayFamily::Exponential, s}; }
  static DelaySpec degenerate() { return {DelayFamily::Degenerate, 0.0}; }

  void validate() const {
    if (!std::isfinite(sigma) || sigma < 0.0)
      throw std::invalid_argument("delay sigma must be finite and >= 0");
    if (family == DelayFamily::Degenerate && sigma != 0.0)
      throw std::invalid_argument("degenerate delay requires sigma == 0");
  }

  bool is_degenerate() const {
    return sigma == 0.0 || family == DelayFamily::Degenerate;
  }
};

// z with P(N(0,1) > z) <= eps, by bisection on erfc. Monotone, so ~100
// halvings pin the root to full double precision; the upper endpoint keeps
// the bound conservative.
inline double normal_upper_quantile(double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("quantile eps must be in (0, 0.5)");
  double lo = 0.0, hi = 60.0;
  for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(mid / std::numbers::sqrt2) > eps)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

inline double delay_pdf(const DelaySpec& spec, double t) {
  spec.validate();
  if (spec.is_degenerate())
    throw std::domain_error("degenerate delay law has no density");
  const double s = spec.sigma;
  switch (spec.family) {
    case DelayFamily::Uniform: {
      const double h = s * std::numbers::sqrt3;
      return std::abs(t) <= h ? 1.0 / (2.0 * h) : 0.0;
    }
    case DelayFamily::Triangular: {
      const double h = s * std::sqrt(6.0);
      return std::abs(t) <= h ? (1.0 - std::abs(t) / h) / h : 0.0;
    }
    case DelayFamily::Normal: {
      const double z = t / s;
      return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * std::numbers::pi));
    }
    case DelayFamily::Exponential:
      return t >= -s ? std::exp(-(t / s + 1.0)) / s : 0.0;
    case DelayFamily::Degenerate: break;
  }
  return 0.0;
}

// F_xi(t). Right-continuous; total on all of R.
inline double delay_cdf(const DelaySpec& spec, double t) {
  spec.validate();
  const double s = spec.sigma;
  if (spec.is_degenerate()) return t >= 0.0 ? 1.0 : 0.0;
  switch (spec.family) {
    case DelayFamily::Uniform: {
      const double h = s * std::numbers::sqrt3;
      if (t <= -h) return 0.0;
      if (t >= h) return 1.0;
      return (t + h) / (2.0 * h);
    }
    case DelayFamily::Triangular: {
      const double h = s * std::sqrt(6.0);
      if (t <= -h) return 0.0;
      if (t >= h) return 1.0;
      if (t < 0.0) {
        const double u = (h + t) / h;
        return 0.5 * u * u;
      }
      const double u = (h - t) / h;
      return 1.0 - 0.5 * u * u;
    }
    case DelayFamily::Normal:
      return 0.5 * std::erfc(-t / (s * std::numbers::sqrt2));
    case DelayFamily::Exponential:
      return t < -s ? 0.0 : -std::expm1(-(t / s + 1.0));
    case DelayFamily::Degenerate: break;
  }
  return 0.0;
}

inline double sample_delay(const DelaySpec& spec, Rng& rng) {
  spec.validate();
  const double s = spec.sigma;
  if (spec.is_degenerate()) return 0.0;
  switch (spec.family) {
    case DelayFamily::Uniform: {
      const double h = s * std::numbers::sqrt3;
      return h * (2.0 * rng.uniform01() - 1.0);
    }
    case DelayFamily::Triangular: {
      const double h = s * std::sqrt(6.0);
      const double u = rng.uniform01();
      return u <= 0.5 ? h * (std::sqrt(2.0 * u) - 1.0)
                      : h * (1.0 - std::sqrt(2.0 * (1.0 - u)));
    }
    case DelayFamily::Normal:
      return s * rng.normal();
    case DelayFamily::Exponential:
      return s * (rng.exponential() - 1.0);
    case DelayFamily::Degenerate: break;
  }
  return 0.0;
}

// Half-width B with P(xi > B) <= eps and P(xi < -B) <= eps: the exact
// support bound for bounded families, the (1 - eps) quantile offset for the
// unbounded ones. Feeds the schedule-index truncation window.
inline double delay_tail_halfwidth(const DelaySpec& spec, double eps) {
  spec.validate();
  if (!(eps > 0.0 && eps < 0.5) || !std::isfinite(eps))
    throw std::invalid_argument("truncation tolerance must be in (0, 0.5)");
  const double s = spec.sigma;
  if (spec.is_degenerate()) return 0.0;
  switch (spec.family) {
    case DelayFamily::Uniform: return s * std::numbers::sqrt3;
    case DelayFamily::Triangular: return s * std::sqrt(6.0);
    case DelayFamily::Normal: return s * normal_upper_quantile(eps);
    case DelayFamily::Exponential:
      // lower support ends at -s; the upper tail needs the quantile
      return s * std::max(1.0, std::log(1.0 / eps) - 1.0);
    case DelayFamily::Degenerate: break;
  }
  return 0.0;
}

}  // namespace psra
