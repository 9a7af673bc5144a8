#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "psra/histogram.hpp"

namespace psra {

namespace detail {
inline void require_common_grid(const EmpiricalDistribution& p,
                                const EmpiricalDistribution& q) {
  if (p.bin_edges != q.bin_edges)
    throw std::invalid_argument("distributions are not on a common grid; rebin first");
}
}  // namespace detail

// Total variation distance, (1/2) sum |p_k - q_k|. In [0, 1].
inline double total_variation(const EmpiricalDistribution& p,
                              const EmpiricalDistribution& q) {
  detail::require_common_grid(p, q);
  double acc = 0.0;
  for (std::size_t k = 0; k < p.bins(); ++k) acc += std::abs(p.mass[k] - q.mass[k]);
  return std::clamp(0.5 * acc, 0.0, 1.0);
}

// Hellinger distance, sqrt((1/2) sum (sqrt(p_k) - sqrt(q_k))^2). In [0, 1].
inline double hellinger(const EmpiricalDistribution& p, const EmpiricalDistribution& q) {
  detail::require_common_grid(p, q);
  double acc = 0.0;
  for (std::size_t k = 0; k < p.bins(); ++k) {
    const double d = std::sqrt(p.mass[k]) - std::sqrt(q.mass[k]);
    acc += d * d;
  }
  return std::clamp(std::sqrt(0.5 * acc), 0.0, 1.0);
}

}  // namespace psra
