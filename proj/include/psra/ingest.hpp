#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace psra {

// One raw flight movement. Epochs are seconds on a local wall clock; no
// timezone or DST correction is applied (windows never straddle one).
struct FlightRecord {
  std::string flight_id;
  std::string entry_point;
  double entry_epoch = 0.0;
  double landing_epoch = 0.0;
};

struct QueueSample {
  std::string flight_id;
  std::string entry_point;
  double queue_time = 0.0;  // seconds
};

struct RowError {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string message;
};

struct ParsedFlights {
  std::vector<FlightRecord> records;
  std::vector<RowError> errors;
};

namespace detail {

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
inline long long days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long long>(doe) - 719468;
}

inline std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

// Parses ISO-8601 "YYYY-MM-DDTHH:MM:SS[.fff][Z]" (space separator also
// accepted) into seconds since 1970-01-01 on the same wall clock.
inline std::optional<double> parse_timestamp(const std::string& text) {
  const std::string s = detail::strip(text);
  int y = 0, mo = 0, d = 0, h = 0, mi = 0;
  double sec = 0.0;
  char sep = 0;
  int consumed = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2d%c%2d:%2d:%lf%n", &y, &mo, &d, &sep, &h, &mi,
                  &sec, &consumed) != 7)
    return std::nullopt;
  if (sep != 'T' && sep != ' ') return std::nullopt;
  std::string rest = s.substr(static_cast<std::size_t>(consumed));
  if (!rest.empty() && rest != "Z") return std::nullopt;
  if (mo < 1 || mo > 12 || d < 1 || d > 31) return std::nullopt;
  if (h < 0 || h > 23 || mi < 0 || mi > 59 || sec < 0.0 || sec >= 61.0) return std::nullopt;
  return static_cast<double>(detail::days_from_civil(y, static_cast<unsigned>(mo),
                                                     static_cast<unsigned>(d))) *
             86400.0 +
         h * 3600.0 + mi * 60.0 + sec;
}

// CSV with header `flight_id,entry_point,entry_epoch,landing_epoch`.
// Malformed rows land in the error report instead of being dropped
// silently; a landing before the entry is a row-level error too.
inline ParsedFlights parse_flights(std::istream& in) {
  ParsedFlights out;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = detail::strip(line);
    if (text.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (text != "flight_id,entry_point,entry_epoch,landing_epoch")
        out.errors.push_back({line_no, "unexpected header: " + text});
      continue;
    }
    const auto fields = detail::split_csv_row(text);
    if (fields.size() != 4) {
      out.errors.push_back({line_no, "expected 4 fields, got " + std::to_string(fields.size())});
      continue;
    }
    const std::string id = detail::strip(fields[0]);
    const std::string entry_point = detail::strip(fields[1]);
    const auto entry = parse_timestamp(fields[2]);
    const auto landing = parse_timestamp(fields[3]);
    if (id.empty() || entry_point.empty()) {
      out.errors.push_back({line_no, "empty flight_id or entry_point"});
      continue;
    }
    if (!entry || !landing) {
      out.errors.push_back({line_no, "unparseable timestamp"});
      continue;
    }
    if (*landing < *entry) {
      out.errors.push_back({line_no, "landing precedes entry for flight " + id});
      continue;
    }
    out.records.push_back({id, entry_point, *entry, *landing});
  }
  return out;
}

inline ParsedFlights parse_flights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read flight file: " + path);
  return parse_flights(in);
}

// Daily time-of-day window [start, end) in seconds since midnight;
// closed-left, open-right.
struct DailyWindow {
  double start = 0.0;
  double end = 0.0;

  void validate() const {
    if (!(start >= 0.0 && start < end && end <= 86400.0))
      throw std::invalid_argument("daily window must satisfy 0 <= start < end <= 24h");
  }
  bool contains(double seconds_of_day) const {
    return seconds_of_day >= start && seconds_of_day < end;
  }
};

// "HH:MM" -> seconds of day.
inline double parse_time_of_day(const std::string& text) {
  int h = 0, m = 0;
  char dummy = 0;
  if (std::sscanf(text.c_str(), "%2d:%2d%c", &h, &m, &dummy) != 2 || h < 0 || h > 24 ||
      m < 0 || m > 59 || (h == 24 && m != 0))
    throw std::invalid_argument("bad time of day: " + text);
  return h * 3600.0 + m * 60.0;
}

inline double seconds_of_day(double epoch) {
  return epoch - std::floor(epoch / 86400.0) * 86400.0;
}

// Keeps records whose landing epoch's time of day falls in one of the
// windows and whose entry point is in the set. Windows must not overlap.
inline std::vector<FlightRecord> filter_records(std::span<const FlightRecord> records,
                                                std::span<const DailyWindow> windows,
                                                const std::set<std::string>& entry_points) {
  for (const auto& w : windows) w.validate();
  for (std::size_t a = 0; a < windows.size(); ++a)
    for (std::size_t b = a + 1; b < windows.size(); ++b)
      if (windows[a].start < windows[b].end && windows[b].start < windows[a].end)
        throw std::invalid_argument("daily windows overlap");

  std::vector<FlightRecord> out;
  for (const auto& r : records) {
    if (!entry_points.contains(r.entry_point)) continue;
    const double tod = seconds_of_day(r.landing_epoch);
    const bool in_window = std::any_of(windows.begin(), windows.end(),
                                       [&](const DailyWindow& w) { return w.contains(tod); });
    if (in_window) out.push_back(r);
  }
  return out;
}

// Approaching time = landing - entry; queue time = approaching time minus
// the per-entry-point minimum, so each entry point contributes at least one
// exact zero. Samples are pooled across entry points, in input order.
inline std::vector<QueueSample> queue_times(std::span<const FlightRecord> records) {
  std::map<std::string, double> min_approach;
  for (const auto& r : records) {
    const double approach = r.landing_epoch - r.entry_epoch;
    const auto [it, inserted] = min_approach.try_emplace(r.entry_point, approach);
    if (!inserted) it->second = std::min(it->second, approach);
  }
  std::vector<QueueSample> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const double approach = r.landing_epoch - r.entry_epoch;
    out.push_back({r.flight_id, r.entry_point, approach - min_approach.at(r.entry_point)});
  }
  return out;
}

// rho = average arrivals per hour / maximum landings per hour. A ratio
// above 1 flags an unstable regime but is still returned.
inline double traffic_intensity(double avg_arrivals_per_hour, double max_landings_per_hour) {
  if (!(avg_arrivals_per_hour > 0.0) || !(max_landings_per_hour > 0.0))
    throw std::invalid_argument("traffic_intensity needs positive rates");
  return avg_arrivals_per_hour / max_landings_per_hour;
}

// CSV export: `flight_id,entry_point,queue_time_minutes`.
inline void write_csv(std::span<const QueueSample> samples, std::ostream& os) {
  os << "flight_id,entry_point,queue_time_minutes\n";
  char buf[64];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof(buf), "%.9g\n", s.queue_time / 60.0);
    os << s.flight_id << ',' << s.entry_point << ',' << buf;
  }
}

}  // namespace psra
