#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "psra/arrivals.hpp"

namespace psra {

// Two consecutive equal-length count windows (t, t+T] and (t+T, t+2T].
struct SlotPair {
  double t = 0.0;
  double T = 1.0;

  double first_lo() const { return t; }
  double first_hi() const { return t + T; }
  double second_hi() const { return t + 2.0 * T; }

  void validate() const {
    if (!std::isfinite(t) || !std::isfinite(T) || T <= 0.0)
      throw std::invalid_argument("slot pair needs finite t and T > 0");
  }
};

// Probability that schedule index i lands in (t1, t2] and survives thinning:
// gamma * (F_xi(t2 - i/lambda) - F_xi(t1 - i/lambda)).
inline double arrival_probability(const ProcessSpec& spec, long long i, double t1,
                                  double t2) {
  if (!(t1 <= t2)) throw std::invalid_argument("arrival_probability needs t1 <= t2");
  const double slot = static_cast<double>(i) / spec.lambda;
  const double p =
      spec.gamma * (delay_cdf(spec.delay, t2 - slot) - delay_cdf(spec.delay, t1 - slot));
  return std::max(p, 0.0);
}

namespace detail {
// Index window wide enough that every index with nonnegligible mass in
// (t1, t2] is included (tail mass below eps per side).
inline std::pair<long long, long long> covering_window(const ProcessSpec& spec, double t1,
                                                       double t2, double eps) {
  const double half = delay_tail_halfwidth(spec.delay, eps);
  return index_window(spec.lambda, t1 - half, t2 + half);
}
}  // namespace detail

// E(number of retained arrivals in (t1, t2]) = sum_i p_i, truncated to the
// covering window. For windows of length k/lambda the exact value is
// gamma * k; truncation keeps the error orders below 1e-9.
inline double expected_count(const ProcessSpec& spec, double t1, double t2,
                             double eps = kDefaultTruncationEps) {
  spec.validate();
  if (!(t1 <= t2)) throw std::invalid_argument("expected_count needs t1 <= t2");
  const auto [i_lo, i_hi] = detail::covering_window(spec, t1, t2, eps);
  double acc = 0.0;
  for (long long i = i_lo; i <= i_hi; ++i) acc += arrival_probability(spec, i, t1, t2);
  return acc;
}

// Cov(n1, n2) = -sum_i p_i(t, t+T) * p_i(t+T, t+2T) for counts in two
// consecutive slots. Nonpositive for every spec: a scheduled aircraft can
// land in at most one of two disjoint windows, so the cross term E(n1 n2)
// loses exactly the diagonal. Thinning enters as gamma^2 through the
// per-slot probabilities.
inline double analytic_covariance(const ProcessSpec& spec, const SlotPair& slots,
                                  double eps = kDefaultTruncationEps) {
  spec.validate();
  slots.validate();
  const auto [i_lo, i_hi] =
      detail::covering_window(spec, slots.first_lo(), slots.second_hi(), eps);
  double acc = 0.0;
  for (long long i = i_lo; i <= i_hi; ++i) {
    const double p1 = arrival_probability(spec, i, slots.first_lo(), slots.first_hi());
    if (p1 == 0.0) continue;
    const double p2 = arrival_probability(spec, i, slots.first_hi(), slots.second_hi());
    acc += p1 * p2;
  }
  return -acc;
}

struct CovarianceEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t replications = 0;
};

// Sample covariance (unbiased, n-1 normalization) of the per-replication
// slot-count pair, with a standard error from the sample variance of the
// product deviations.
inline CovarianceEstimate empirical_covariance(std::span<const ArrivalStream> streams,
                                               const SlotPair& slots) {
  slots.validate();
  const std::size_t n = streams.size();
  if (n < 2) throw std::invalid_argument("empirical_covariance needs >= 2 replications");

  std::vector<double> x(n), y(n);
  for (std::size_t r = 0; r < n; ++r) {
    const Interval h = streams[r].spec.horizon;
    if (!(h.lo <= slots.first_lo() && slots.second_hi() <= h.hi))
      throw std::invalid_argument("replication horizon does not cover (t, t+2T]");
    x[r] = static_cast<double>(count_in(streams[r], slots.first_lo(), slots.first_hi()));
    y[r] = static_cast<double>(count_in(streams[r], slots.first_hi(), slots.second_hi()));
  }

  double mx = 0.0, my = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    mx += x[r];
    my += y[r];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  std::vector<double> d(n);
  double md = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    d[r] = (x[r] - mx) * (y[r] - my);
    md += d[r];
  }
  md /= static_cast<double>(n);

  double vd = 0.0;
  for (double v : d) vd += (v - md) * (v - md);
  vd /= static_cast<double>(n - 1);

  CovarianceEstimate out;
  out.estimate = md * static_cast<double>(n) / static_cast<double>(n - 1);
  out.std_error = std::sqrt(vd / static_cast<double>(n));
  out.replications = n;
  return out;
}

// Empirical pmf of the count in (t1, t2] across replications; index k holds
// P(count = k).
inline std::vector<double> count_pmf(std::span<const ArrivalStream> streams, double t1,
                                     double t2) {
  if (streams.empty()) throw std::invalid_argument("count_pmf needs >= 1 replication");
  std::vector<double> pmf;
  for (const auto& s : streams) {
    const auto c = static_cast<std::size_t>(count_in(s, t1, t2));
    if (c >= pmf.size()) pmf.resize(c + 1, 0.0);
    pmf[c] += 1.0;
  }
  for (double& m : pmf) m /= static_cast<double>(streams.size());
  return pmf;
}

inline double poisson_pmf(double mu, std::size_t k) {
  if (mu == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(-mu + static_cast<double>(k) * std::log(mu) -
                  std::lgamma(static_cast<double>(k) + 1.0));
}

struct TvEstimate {
  double tv = 0.0;
  double std_error = 0.0;
};

// TV between an empirical count pmf (n i.i.d. replications) and the Poisson
// law of mean mu. Poisson mass beyond the observed support enters as a tail
// term; the standard error is the multinomial delta-method estimate.
inline TvEstimate tv_to_poisson(const std::vector<double>& pmf, double mu,
                                std::size_t n_replications) {
  double acc = 0.0;
  double signed_mass = 0.0;  // sum p_hat_k * sign(p_hat_k - q_k)
  double q_total = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    const double q = poisson_pmf(mu, k);
    q_total += q;
    acc += std::abs(pmf[k] - q);
    signed_mass += pmf[k] * (pmf[k] >= q ? 1.0 : -1.0);
  }
  acc += std::max(1.0 - q_total, 0.0);  // Poisson tail beyond observed counts

  TvEstimate out;
  out.tv = std::clamp(0.5 * acc, 0.0, 1.0);
  const double var =
      std::max(1.0 - signed_mass * signed_mass, 0.0) / (4.0 * static_cast<double>(n_replications));
  out.std_error = std::sqrt(var);
  return out;
}

}  // namespace psra
