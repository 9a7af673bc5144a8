// Test-side oracles, kept independent of the library code paths they check:
// quadrature for the delay laws, an event-driven queue simulator to pit
// against the Lindley recursion, and small statistics helpers.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace oracle {

// Composite Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int panels = 4000) {
  if (panels % 2 != 0) ++panels;
  const double h = (b - a) / panels;
  double acc = f(a) + f(b);
  for (int k = 1; k < panels; ++k) acc += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// Integrates f over consecutive smooth pieces split at the given breakpoints.
inline double piecewise_simpson(const std::function<double(double)>& f,
                                const std::vector<double>& breakpoints,
                                int panels_per_piece = 4000) {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k)
    acc += simpson(f, breakpoints[k], breakpoints[k + 1], panels_per_piece);
  return acc;
}

// Event-driven single-server FIFO simulator: an event calendar plus an
// explicit waiting room and server flag. Waits come out of the event
// bookkeeping, not the Lindley recursion.
inline std::vector<double> event_list_waits(const std::vector<double>& arrivals,
                                            const std::vector<double>& services) {
  if (arrivals.size() != services.size())
    throw std::invalid_argument("arrivals and services must pair up");
  const std::size_t n = arrivals.size();

  // event: (time, kind, customer); departures (kind 0) before arrivals at ties
  using Event = std::tuple<double, int, std::size_t>;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> calendar;
  for (std::size_t i = 0; i < n; ++i) calendar.emplace(arrivals[i], 1, i);

  std::vector<double> waits(n, 0.0);
  std::queue<std::size_t> waiting_room;
  bool server_busy = false;

  const auto begin_service = [&](std::size_t customer, double now) {
    server_busy = true;
    waits[customer] = now - arrivals[customer];
    calendar.emplace(now + services[customer], 0, customer);
  };

  while (!calendar.empty()) {
    const auto [now, kind, customer] = calendar.top();
    calendar.pop();
    if (kind == 1) {  // arrival
      if (server_busy)
        waiting_room.push(customer);
      else
        begin_service(customer, now);
    } else {  // departure
      server_busy = false;
      if (!waiting_room.empty()) {
        const std::size_t next = waiting_room.front();
        waiting_room.pop();
        begin_service(next, now);
      }
    }
  }
  return waits;
}

inline double mean(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double v : xs) acc += v;
  return acc / static_cast<double>(xs.size());
}

inline double sample_std(const std::vector<double>& xs) {
  const double m = mean(xs);
  double acc = 0.0;
  for (double v : xs) acc += (v - m) * (v - m);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

// TV between two empirical pmfs over {0, 1, 2, ...}.
inline double pmf_tv(const std::vector<double>& p, const std::vector<double>& q) {
  const std::size_t n = std::max(p.size(), q.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double pk = k < p.size() ? p[k] : 0.0;
    const double qk = k < q.size() ? q[k] : 0.0;
    acc += std::abs(pk - qk);
  }
  return 0.5 * acc;
}

}  // namespace oracle
