#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace psra {

// Binned probability mass on a common grid; the shared currency of every
// distance computation. Bins are left-closed: mass[k] sits on
// [bin_edges[k], bin_edges[k+1]).
struct EmpiricalDistribution {
  std::vector<double> bin_edges;  // size nbins + 1, strictly increasing
  std::vector<double> mass;       // nonnegative, sums to 1
  std::size_t sample_count = 0;

  std::size_t bins() const { return mass.size(); }

  void validate() const {
    if (bin_edges.size() < 2 || mass.size() + 1 != bin_edges.size())
      throw std::invalid_argument("distribution needs nbins >= 1 and nbins + 1 edges");
    for (std::size_t k = 0; k + 1 < bin_edges.size(); ++k)
      if (!(bin_edges[k] < bin_edges[k + 1]))
        throw std::invalid_argument("bin edges must be strictly increasing");
    double total = 0.0;
    for (double m : mass) {
      if (!(m >= 0.0)) throw std::invalid_argument("bin mass must be nonnegative");
      total += m;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw std::invalid_argument("bin masses must sum to 1");
  }

  double mean() const {
    double acc = 0.0;
    for (std::size_t k = 0; k < mass.size(); ++k)
      acc += mass[k] * 0.5 * (bin_edges[k] + bin_edges[k + 1]);
    return acc;
  }
};

// Histogram of nonnegative values on the uniform grid {0, w, 2w, ...}
// extending to the maximum value; normalized to total mass 1. Every
// histogram built with the same width shares edge doubles exactly, which is
// what the grid-alignment checks downstream rely on.
inline EmpiricalDistribution histogram(std::span<const double> values, double bin_width) {
  if (values.empty()) throw std::invalid_argument("histogram needs at least one sample");
  if (!(bin_width > 0.0) || !std::isfinite(bin_width))
    throw std::invalid_argument("bin width must be finite and > 0");

  double max_v = 0.0;
  for (double v : values) {
    if (!(v >= 0.0)) throw std::invalid_argument("histogram values must be >= 0");
    max_v = std::max(max_v, v);
  }
  const std::size_t nbins = static_cast<std::size_t>(std::floor(max_v / bin_width)) + 1;

  EmpiricalDistribution d;
  d.bin_edges.resize(nbins + 1);
  for (std::size_t k = 0; k <= nbins; ++k)
    d.bin_edges[k] = static_cast<double>(k) * bin_width;
  d.mass.assign(nbins, 0.0);
  for (double v : values) {
    const std::size_t k =
        std::min(static_cast<std::size_t>(v / bin_width), nbins - 1);
    d.mass[k] += 1.0;
  }
  const double n = static_cast<double>(values.size());
  for (double& m : d.mass) m /= n;
  d.sample_count = values.size();
  return d;
}

// Mass-preserving regrid. Every source bin carrying mass must fall inside
// exactly one target bin; a straddling edge means the grids are misaligned
// and the call refuses rather than split mass. Coarsening, identity, and
// zero-padding extension all satisfy this.
inline EmpiricalDistribution rebin(const EmpiricalDistribution& p,
                                   std::vector<double> new_edges) {
  p.validate();
  if (new_edges.size() < 2)
    throw std::invalid_argument("rebin target needs at least one bin");
  for (std::size_t k = 0; k + 1 < new_edges.size(); ++k)
    if (!(new_edges[k] < new_edges[k + 1]))
      throw std::invalid_argument("rebin target edges must be strictly increasing");

  EmpiricalDistribution out;
  out.mass.assign(new_edges.size() - 1, 0.0);
  std::size_t j = 0;
  for (std::size_t i = 0; i < p.bins(); ++i) {
    if (p.mass[i] == 0.0) continue;
    const double lo = p.bin_edges[i];
    const double hi = p.bin_edges[i + 1];
    while (j + 1 < new_edges.size() && new_edges[j + 1] < hi) ++j;
    if (j + 1 >= new_edges.size() || !(new_edges[j] <= lo && hi <= new_edges[j + 1]))
      throw std::invalid_argument("rebin: source bin does not align with target grid");
    out.mass[j] += p.mass[i];
  }
  out.bin_edges = std::move(new_edges);
  out.sample_count = p.sample_count;
  return out;
}

// Extends whichever of the two grids is a prefix of the other so both cover
// the union range. Histograms built by `histogram` with one bin width always
// align this way; anything else is a caller error.
inline void align_grids(EmpiricalDistribution& a, EmpiricalDistribution& b) {
  const auto is_prefix = [](const std::vector<double>& shorter,
                            const std::vector<double>& longer) {
    return shorter.size() <= longer.size() &&
           std::equal(shorter.begin(), shorter.end(), longer.begin());
  };
  if (a.bin_edges == b.bin_edges) return;
  if (is_prefix(a.bin_edges, b.bin_edges))
    a = rebin(a, b.bin_edges);
  else if (is_prefix(b.bin_edges, a.bin_edges))
    b = rebin(b, a.bin_edges);
  else
    throw std::invalid_argument("distribution grids are not alignable");
}

inline nlohmann::json to_json(const EmpiricalDistribution& d) {
  return nlohmann::json{{"edges", d.bin_edges}, {"mass", d.mass}, {"n", d.sample_count}};
}

inline EmpiricalDistribution distribution_from_json(const nlohmann::json& j) {
  EmpiricalDistribution d;
  d.bin_edges = j.at("edges").get<std::vector<double>>();
  d.mass = j.at("mass").get<std::vector<double>>();
  d.sample_count = j.at("n").get<std::size_t>();
  d.validate();
  return d;
}

inline EmpiricalDistribution load_distribution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read distribution file: " + path);
  nlohmann::json j;
  in >> j;
  return distribution_from_json(j);
}

// CSV export: `bin_left,bin_right,mass`, round-trip precision.
inline void write_csv(const EmpiricalDistribution& d, std::ostream& os) {
  os << "bin_left,bin_right,mass\n";
  char buf[128];
  for (std::size_t k = 0; k < d.bins(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", d.bin_edges[k],
                  d.bin_edges[k + 1], d.mass[k]);
    os << buf;
  }
}

}  // namespace psra
