#pragma once

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "psra/arrivals.hpp"
#include "psra/histogram.hpp"
#include "psra/service.hpp"

namespace psra {

struct QueueRecord {
  double arrival = 0.0;
  double wait = 0.0;
  double service = 0.0;
  double departure = 0.0;
};

// Per-customer outcome of one replication, in arrival (= FIFO departure)
// order. The first warmup_count records are flagged as warm-up and excluded
// from statistics.
struct QueueTrace {
  std::vector<QueueRecord> records;
  std::size_t warmup_count = 0;

  std::size_t size() const { return records.size(); }
  std::size_t stationary_count() const { return records.size() - warmup_count; }
};

// Warm-up flagging rule: a fixed customer count, or every customer arriving
// within a duration of the first arrival.
struct Warmup {
  enum class Kind { Count, Duration };
  Kind kind = Kind::Count;
  double value = 0.0;

  static Warmup none() { return {Kind::Count, 0.0}; }
  static Warmup count(std::size_t n) { return {Kind::Count, static_cast<double>(n)}; }
  static Warmup duration(double d) {
    if (!(d >= 0.0)) throw std::invalid_argument("warm-up duration must be >= 0");
    return {Kind::Duration, d};
  }
};

// Single-server FIFO queue, empty at the first arrival. The Lindley
// recursion W_{n+1} = max(0, W_n + S_n - (A_{n+1} - A_n)) is evaluated in
// absolute time as start_n = max(A_n, D_{n-1}), which is the same recursion
// with D_n = A_n + W_n + S_n carried instead of W_n.
inline QueueTrace simulate_queue(const ArrivalStream& arrivals, const ServiceSpec& service,
                                 Warmup warmup, std::uint64_t seed, std::uint64_t stream = 0) {
  service.validate();
  QueueTrace trace;
  if (arrivals.epochs.empty()) return trace;

  Rng rng(seed, stream);
  trace.records.reserve(arrivals.epochs.size());
  double prev_departure = arrivals.epochs.front();
  for (double a : arrivals.epochs) {
    const double s = sample_service(service, rng);
    const double start = std::max(a, prev_departure);
    const double w = start - a;
    const double d = start + s;
    trace.records.push_back({a, w, s, d});
    prev_departure = d;
  }

  if (warmup.kind == Warmup::Kind::Count) {
    trace.warmup_count =
        std::min(trace.records.size(), static_cast<std::size_t>(warmup.value));
  } else {
    const double cutoff = trace.records.front().arrival + warmup.value;
    std::size_t n = 0;
    while (n < trace.records.size() && trace.records[n].arrival < cutoff) ++n;
    trace.warmup_count = n;
  }
  return trace;
}

// Histogram of non-warm-up waits on {0, w, 2w, ...}, normalized.
inline EmpiricalDistribution wait_distribution(const QueueTrace& trace, double bin_width) {
  if (trace.stationary_count() == 0)
    throw std::invalid_argument("wait_distribution: trace has no non-warm-up records");
  std::vector<double> waits;
  waits.reserve(trace.stationary_count());
  for (std::size_t k = trace.warmup_count; k < trace.records.size(); ++k)
    waits.push_back(trace.records[k].wait);
  return histogram(waits, bin_width);
}

// Right-continuous number-in-system step function: +1 at arrivals, -1 at
// departures, constant in between.
struct QueueLengthProcess {
  std::vector<double> times;  // strictly increasing event epochs
  std::vector<long long> counts;  // value on [times[k], times[k+1])

  long long at(double t) const {
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return 0;
    return counts[static_cast<std::size_t>(it - times.begin()) - 1];
  }
};

inline QueueLengthProcess queue_length_process(const QueueTrace& trace) {
  QueueLengthProcess p;
  const std::size_t n = trace.records.size();
  if (n == 0) return p;

  p.times.reserve(2 * n);
  p.counts.reserve(2 * n);
  long long level = 0;
  std::size_t ia = 0, id = 0;  // departures are nondecreasing under FIFO
  while (ia < n || id < n) {
    double t;
    if (ia < n && (id >= n || trace.records[ia].arrival <= trace.records[id].departure))
      t = trace.records[ia].arrival;
    else
      t = trace.records[id].departure;
    long long delta = 0;
    while (ia < n && trace.records[ia].arrival == t) ++delta, ++ia;
    while (id < n && trace.records[id].departure == t) --delta, ++id;
    if (delta != 0) {
      level += delta;
      if (!p.times.empty() && p.times.back() == t)
        p.counts.back() = level;
      else {
        p.times.push_back(t);
        p.counts.push_back(level);
      }
    }
  }
  return p;
}

// CSV export: `arrival,wait,service,departure`, round-trip precision.
inline void write_csv(const QueueTrace& trace, std::ostream& os) {
  os << "arrival,wait,service,departure\n";
  char buf[160];
  for (const auto& r : trace.records) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", r.arrival, r.wait,
                  r.service, r.departure);
    os << buf;
  }
}

}  // namespace psra
