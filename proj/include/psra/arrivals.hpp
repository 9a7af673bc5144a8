#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "psra/delay.hpp"
#include "psra/rng.hpp"

namespace psra {

inline constexpr double kDefaultTruncationEps = 1e-12;

// Time interval, treated as half-open (lo, hi] throughout: an epoch or
// scheduled slot belongs to the window that contains its right edge. This
// keeps abutting slots disjoint and makes counts over a horizon of length
// k/lambda hold exactly k schedule points.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double t) const { return t > lo && t <= hi; }
  bool covers(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }

  void validate() const {
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo)
      throw std::invalid_argument("interval must be finite with hi >= lo");
  }
};

// Arrival process description: schedule rate lambda, delay law, independent
// retention gamma (a scheduled arrival is cancelled with probability
// 1 - gamma), and the observation horizon. The retained stream has mean rate
// gamma * lambda; against a deterministic rate-lambda server the traffic
// intensity is rho = gamma.
struct ProcessSpec {
  double lambda = 1.0;
  DelaySpec delay;
  double gamma = 1.0;
  Interval horizon;

  void validate() const {
    if (!std::isfinite(lambda) || lambda <= 0.0)
      throw std::invalid_argument("lambda must be finite and > 0");
    if (!std::isfinite(gamma) || gamma <= 0.0 || gamma > 1.0)
      throw std::invalid_argument("gamma must be in (0, 1]");
    delay.validate();
    horizon.validate();
  }
};

// One realized stream. epochs is sorted nondecreasing with ties broken by
// scheduled index; identical (spec, seed, stream) reproduce it bit for bit.
struct ArrivalStream {
  std::vector<double> epochs;
  std::vector<long long> source_index;  // schedule index i; ordinal for Poisson streams
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  ProcessSpec spec;
  bool poisson = false;

  std::size_t size() const { return epochs.size(); }
};

// Schedule indices whose slot i/lambda falls in (lo, hi].
inline std::pair<long long, long long> index_window(double lambda, double lo, double hi) {
  const long long i_lo = static_cast<long long>(std::floor(lambda * lo)) + 1;
  const long long i_hi = static_cast<long long>(std::floor(lambda * hi));
  return {i_lo, i_hi};
}

// Realizes t_i = i/lambda + xi_i for every index whose schedule slot lies
// within tail_halfwidth of the horizon, thins with probability 1 - gamma,
// and keeps the epochs that land inside. The widened index window bounds the
// probability of missing an in-horizon arrival below eps per index.
inline ArrivalStream generate_psra(const ProcessSpec& spec, std::uint64_t seed,
                                   std::uint64_t stream = 0,
                                   double eps = kDefaultTruncationEps) {
  spec.validate();
  const double half = delay_tail_halfwidth(spec.delay, eps);
  if (!std::isfinite(half))
    throw std::invalid_argument("delay tail bound cannot cover the horizon at this tolerance");

  ArrivalStream out;
  out.seed = seed;
  out.stream = stream;
  out.spec = spec;

  const auto [i_lo, i_hi] =
      index_window(spec.lambda, spec.horizon.lo - half, spec.horizon.hi + half);
  if (i_hi < i_lo) return out;

  Rng rng(seed, stream);
  std::vector<std::pair<double, long long>> kept;
  kept.reserve(static_cast<std::size_t>(
      std::min<double>(static_cast<double>(i_hi - i_lo + 1) * spec.gamma + 16.0, 1e9)));
  for (long long i = i_lo; i <= i_hi; ++i) {
    const double xi = sample_delay(spec.delay, rng);
    const double u = rng.uniform01();
    const double t = static_cast<double>(i) / spec.lambda + xi;
    if (u < spec.gamma && spec.horizon.contains(t)) kept.emplace_back(t, i);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  out.epochs.reserve(kept.size());
  out.source_index.reserve(kept.size());
  for (const auto& [t, i] : kept) {
    out.epochs.push_back(t);
    out.source_index.push_back(i);
  }
  return out;
}

// Homogeneous Poisson stream on (lo, hi]; i.i.d. exponential gaps with mean
// 1/rate. source_index is the ordinal position.
inline ArrivalStream generate_poisson(double rate, const Interval& horizon,
                                      std::uint64_t seed, std::uint64_t stream = 0) {
  if (!std::isfinite(rate) || rate <= 0.0)
    throw std::invalid_argument("rate must be finite and > 0");
  horizon.validate();

  ArrivalStream out;
  out.seed = seed;
  out.stream = stream;
  out.spec = ProcessSpec{rate, DelaySpec::degenerate(), 1.0, horizon};
  out.poisson = true;

  Rng rng(seed, stream);
  double t = horizon.lo;
  long long n = 0;
  for (;;) {
    t += rng.exponential() / rate;
    if (!(t <= horizon.hi)) break;
    out.epochs.push_back(t);
    out.source_index.push_back(++n);
  }
  return out;
}

// Number of epochs in (lo, hi].
inline long long count_in(const ArrivalStream& s, double lo, double hi) {
  const auto a = std::upper_bound(s.epochs.begin(), s.epochs.end(), lo);
  const auto b = std::upper_bound(s.epochs.begin(), s.epochs.end(), hi);
  return static_cast<long long>(b - a);
}

// CSV export: header `epoch,source_index`, epochs at 9 significant digits.
inline void write_csv(const ArrivalStream& s, std::ostream& os) {
  os << "epoch,source_index\n";
  char buf[64];
  for (std::size_t k = 0; k < s.epochs.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.9g,%lld\n", s.epochs[k], s.source_index[k]);
    os << buf;
  }
}

}  // namespace psra
