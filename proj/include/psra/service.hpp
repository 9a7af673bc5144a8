#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "psra/rng.hpp"

namespace psra {

enum class ServiceFamily { Deterministic, Triangular };

inline const char* to_string(ServiceFamily f) {
  return f == ServiceFamily::Deterministic ? "deterministic" : "triangular";
}

inline ServiceFamily service_family_from_string(const std::string& s) {
  if (s == "deterministic") return ServiceFamily::Deterministic;
  if (s == "triangular") return ServiceFamily::Triangular;
  throw std::invalid_argument("unknown service family: " + s);
}

// Service-time law. Deterministic returns `mean` exactly. Triangular is the
// three-parameter triangular law closed by
//     (a + mode + b) / 3 = mean,      b - mode = 3 * (mode - a),
// i.e. a = (5*mode - 3*mean) / 2 and b = (9*mean - 7*mode) / 2. For
// mean 1, mode 0.8 this puts the support at [0.5, 1.7]. Durations stay
// positive for mode in (0.6*mean, mean); anything else is a configuration
// error. The closure parameters are echoed into experiment output so runs
// are self-describing.
struct ServiceSpec {
  ServiceFamily family = ServiceFamily::Deterministic;
  double mean = 1.0;
  double mode = 0.0;  // Triangular only

  static ServiceSpec deterministic(double mean) {
    return {ServiceFamily::Deterministic, mean, 0.0};
  }
  static ServiceSpec triangular(double mean, double mode) {
    return {ServiceFamily::Triangular, mean, mode};
  }

  double tri_lower() const { return 0.5 * (5.0 * mode - 3.0 * mean); }
  double tri_upper() const { return 0.5 * (9.0 * mean - 7.0 * mode); }

  void validate() const {
    if (!std::isfinite(mean) || mean <= 0.0)
      throw std::invalid_argument("service mean must be finite and > 0");
    if (family == ServiceFamily::Triangular) {
      if (!std::isfinite(mode) || mode <= 0.0 || mode >= mean)
        throw std::invalid_argument("triangular service mode must be in (0, mean)");
      if (tri_lower() < 0.0)
        throw std::invalid_argument(
            "triangular service support crosses 0; mode must exceed 0.6 * mean");
    }
  }
};

inline double sample_service(const ServiceSpec& spec, Rng& rng) {
  spec.validate();
  if (spec.family == ServiceFamily::Deterministic) return spec.mean;
  const double a = spec.tri_lower();
  const double b = spec.tri_upper();
  const double m = spec.mode;
  const double u = rng.uniform01();
  const double split = (m - a) / (b - a);
  return u < split ? a + std::sqrt(u * (b - a) * (m - a))
                   : b - std::sqrt((1.0 - u) * (b - a) * (b - m));
}

}  // namespace psra
