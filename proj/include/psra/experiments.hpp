#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "psra/analytics.hpp"
#include "psra/arrivals.hpp"
#include "psra/detail/parallel.hpp"
#include "psra/distance.hpp"
#include "psra/histogram.hpp"
#include "psra/queue.hpp"
#include "psra/service.hpp"

namespace psra {

// One experiment arm: an arrival process coupled to a service law. The
// retained arrival rate is gamma * lambda for both kinds, so gamma plays the
// traffic intensity rho against the rate-lambda server.
struct ModelSpec {
  std::string name;
  bool poisson = false;  // Poisson baseline (M/D/1 when service is deterministic)
  double lambda = 1.0;
  double gamma = 1.0;
  DelaySpec delay;  // PSRA only
  ServiceSpec service = ServiceSpec::deterministic(1.0);

  double rho() const { return gamma; }

  void validate() const {
    if (name.empty()) throw std::invalid_argument("model needs a name");
    if (!std::isfinite(lambda) || lambda <= 0.0)
      throw std::invalid_argument("model lambda must be > 0");
    if (!std::isfinite(gamma) || gamma <= 0.0 || gamma > 1.0)
      throw std::invalid_argument("model gamma must be in (0, 1]");
    if (!poisson) delay.validate();
    service.validate();
  }
};

struct SimulationPlan {
  std::size_t replications = 1;
  std::size_t customers = 1'000'000;  // per replication, after warm-up
  std::optional<std::size_t> warmup;  // per replication; defaults from rho
  double bin_width = 0.25;            // multiples of the service mean
  std::uint64_t master_seed = 1;
  double truncation_eps = kDefaultTruncationEps;

  void validate() const {
    if (replications < 1) throw std::invalid_argument("need replications >= 1");
    if (customers < 1) throw std::invalid_argument("need customers >= 1");
    if (!(bin_width > 0.0)) throw std::invalid_argument("bin width must be > 0");
  }
};

inline constexpr std::size_t kDefaultWarmupFloor = 100'000;

// Default warm-up: 1e5 customers, or 10/(1-rho)^2 if larger; the relaxation
// time of a heavily loaded queue grows like (1-rho)^-2.
inline std::size_t resolve_warmup(const SimulationPlan& plan, double rho) {
  if (plan.warmup) return *plan.warmup;
  std::size_t w = kDefaultWarmupFloor;
  if (rho < 1.0) {
    const double relax = 10.0 / ((1.0 - rho) * (1.0 - rho));
    if (relax > static_cast<double>(w)) w = static_cast<std::size_t>(std::ceil(relax));
  }
  return w;
}

// Mean waiting time in an M/D/1 queue (Pollaczek-Khinchine), in service
// units.
inline double md1_mean_wait(double rho) { return rho / (2.0 * (1.0 - rho)); }

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// Mean with a batch-means standard error; waits within a replication are
// strongly autocorrelated, so a plain iid error bar would be far too tight.
inline MeanEstimate mean_with_batch_se(std::span<const double> xs,
                                       std::size_t nbatches = 64) {
  MeanEstimate out;
  const std::size_t n = xs.size();
  if (n == 0) return out;
  double total = 0.0;
  for (double v : xs) total += v;
  out.mean = total / static_cast<double>(n);

  if (n < 2 * nbatches) {
    double var = 0.0;
    for (double v : xs) var += (v - out.mean) * (v - out.mean);
    var /= static_cast<double>(n > 1 ? n - 1 : 1);
    out.std_error = std::sqrt(var / static_cast<double>(n));
    return out;
  }
  const std::size_t block = n / nbatches;
  std::vector<double> means;
  means.reserve(nbatches);
  for (std::size_t b = 0; b < nbatches; ++b) {
    double acc = 0.0;
    for (std::size_t i = b * block; i < (b + 1) * block; ++i) acc += xs[i];
    means.push_back(acc / static_cast<double>(block));
  }
  double mb = 0.0;
  for (double m : means) mb += m;
  mb /= static_cast<double>(nbatches);
  double vb = 0.0;
  for (double m : means) vb += (m - mb) * (m - mb);
  vb /= static_cast<double>(nbatches - 1);
  out.std_error = std::sqrt(vb / static_cast<double>(nbatches));
  return out;
}

namespace detail {

// Stream-id layout: each arm owns a 2^32-wide band; replication r uses
// band + 2r for arrivals and band + 2r + 1 for service draws.
inline std::uint64_t arm_stream_base(std::size_t arm_index) {
  return static_cast<std::uint64_t>(arm_index) << 32;
}

// One replication, exactly `customers + warmup` customers. The horizon is
// sized so that generating fewer arrivals is a < 1e-8 tail event; the stream
// is then truncated to exactly that count.
inline QueueTrace replication_trace(const ModelSpec& model, std::size_t customers,
                                    std::size_t warmup, std::uint64_t master_seed,
                                    std::uint64_t stream_base, double eps) {
  const std::size_t n_total = customers + warmup;
  const double rate = model.gamma * model.lambda;
  const double n_d = static_cast<double>(n_total);
  const double horizon_len = (n_d + 6.0 * std::sqrt(n_d) + 64.0) / rate;

  ArrivalStream arrivals;
  if (model.poisson) {
    arrivals = generate_poisson(rate, Interval{0.0, horizon_len}, master_seed, stream_base);
  } else {
    const ProcessSpec spec{model.lambda, model.delay, model.gamma,
                           Interval{0.0, horizon_len}};
    arrivals = generate_psra(spec, master_seed, stream_base, eps);
  }
  if (arrivals.size() < n_total)
    throw std::runtime_error("horizon produced too few arrivals; enlarge the margin");
  arrivals.epochs.resize(n_total);
  arrivals.source_index.resize(n_total);

  return simulate_queue(arrivals, model.service, Warmup::count(warmup), master_seed,
                        stream_base + 1);
}

// Stationary waits of one replication in service-mean units.
inline std::vector<double> replication_waits(const ModelSpec& model, std::size_t customers,
                                             std::size_t warmup, std::uint64_t master_seed,
                                             std::uint64_t stream_base, double eps) {
  const QueueTrace trace =
      replication_trace(model, customers, warmup, master_seed, stream_base, eps);
  std::vector<double> waits;
  waits.reserve(customers);
  for (std::size_t k = trace.warmup_count; k < trace.records.size(); ++k)
    waits.push_back(trace.records[k].wait / model.service.mean);
  return waits;
}

}  // namespace detail

// Full trace of one replication of an arm, warm-up records flagged.
inline QueueTrace simulate_model_trace(const ModelSpec& model, const SimulationPlan& plan,
                                       std::size_t arm_index, std::size_t replication = 0) {
  model.validate();
  plan.validate();
  if (replication >= plan.replications)
    throw std::invalid_argument("replication index out of range");
  return detail::replication_trace(
      model, plan.customers, resolve_warmup(plan, model.rho()), plan.master_seed,
      detail::arm_stream_base(arm_index) + 2 * static_cast<std::uint64_t>(replication),
      plan.truncation_eps);
}

// Pooled stationary waits (service units) over all replications of one arm;
// replications run concurrently on independent substreams and are pooled in
// replication order.
inline std::vector<double> simulate_model_waits(const ModelSpec& model,
                                                const SimulationPlan& plan,
                                                std::size_t arm_index) {
  model.validate();
  plan.validate();
  const std::size_t warmup = resolve_warmup(plan, model.rho());
  std::vector<std::vector<double>> per_rep(plan.replications);
  detail::parallel_for(plan.replications, [&](std::size_t r) {
    per_rep[r] = detail::replication_waits(
        model, plan.customers, warmup, plan.master_seed,
        detail::arm_stream_base(arm_index) + 2 * static_cast<std::uint64_t>(r),
        plan.truncation_eps);
  });
  std::vector<double> pooled;
  pooled.reserve(plan.replications * plan.customers);
  for (auto& w : per_rep) pooled.insert(pooled.end(), w.begin(), w.end());
  return pooled;
}

inline nlohmann::json to_json(const ModelSpec& m) {
  nlohmann::json j{{"name", m.name},
                   {"arrivals", m.poisson ? "poisson" : "psra"},
                   {"lambda", m.lambda},
                   {"gamma", m.gamma},
                   {"service", to_string(m.service.family)},
                   {"service_mean", m.service.mean}};
  if (!m.poisson) {
    j["delay"] = to_string(m.delay.family);
    j["sigma"] = m.delay.sigma;
  }
  if (m.service.family == ServiceFamily::Triangular) {
    j["service_mode"] = m.service.mode;
    j["service_support"] = {m.service.tri_lower(), m.service.tri_upper()};
  }
  return j;
}

inline nlohmann::json to_json(const SimulationPlan& plan, std::size_t resolved_warmup) {
  return nlohmann::json{{"replications", plan.replications},
                        {"customers_per_replication", plan.customers},
                        {"warmup_per_replication", resolved_warmup},
                        {"bin_width_service_units", plan.bin_width},
                        {"master_seed", plan.master_seed},
                        {"truncation_eps", plan.truncation_eps}};
}

struct GridModelResult {
  ModelSpec model;
  EmpiricalDistribution distribution;  // waits in service units
  MeanEstimate mean_wait;              // service units
  std::size_t warmup = 0;
  std::optional<double> pk_reference;  // M/D/1 arms only
};

struct DistanceReport {
  std::string model;
  double tv = 0.0;
  double hellinger = 0.0;
  double bin_width = 0.0;
  std::size_t n_samples = 0;
};

struct GridResult {
  std::vector<GridModelResult> models;
  std::vector<DistanceReport> distances;  // present when a reference was given
  std::string reference_name;
};

// The four-panel comparison set: M/D/1 baseline, PSRA with uniform delays at
// sigma = 20/lambda and 30/lambda under deterministic service, and the
// sigma = 20/lambda variant with triangular service (mean 1/lambda, mode
// 0.8/lambda). With `unthinned`, the PSRA arms trade thinning for a slower
// schedule at the same traffic intensity: spacing 1/(gamma*lambda), gamma 1.
inline std::vector<ModelSpec> heathrow_panel_models(double lambda, double gamma,
                                                    bool unthinned = false) {
  const double psra_lambda = unthinned ? gamma * lambda : lambda;
  const double psra_gamma = unthinned ? 1.0 : gamma;
  const ServiceSpec det = ServiceSpec::deterministic(1.0 / lambda);
  const ServiceSpec tri = ServiceSpec::triangular(1.0 / lambda, 0.8 / lambda);
  return {
      {"md1", true, lambda, gamma, DelaySpec::degenerate(), det},
      {"psra_uniform_s20", false, psra_lambda, psra_gamma,
       DelaySpec::uniform(20.0 / lambda), det},
      {"psra_uniform_s30", false, psra_lambda, psra_gamma,
       DelaySpec::uniform(30.0 / lambda), det},
      {"psra_uniform_s20_triangular", false, psra_lambda, psra_gamma,
       DelaySpec::uniform(20.0 / lambda), tri},
  };
}

// Reference distributions must live on the same {0, w, 2w, ...} grid the
// simulated histograms use. Edges within 1e-9*w of the canonical grid are
// snapped onto it so exact-match distance checks hold downstream.
inline EmpiricalDistribution snap_reference_to_grid(const EmpiricalDistribution& ref,
                                                    double bin_width) {
  ref.validate();
  EmpiricalDistribution out = ref;
  for (std::size_t k = 0; k < out.bin_edges.size(); ++k) {
    const double canonical = static_cast<double>(k) * bin_width;
    if (std::abs(out.bin_edges[k] - canonical) > 1e-9 * bin_width)
      throw std::invalid_argument(
          "reference grid is incompatible with the configured bin width");
    out.bin_edges[k] = canonical;
  }
  return out;
}

// Simulates every arm, bins the pooled waits, and (when a reference is
// supplied) reports TV and Hellinger against it on the aligned grid.
inline GridResult run_model_grid(
    const std::vector<ModelSpec>& models, const SimulationPlan& plan,
    const std::optional<EmpiricalDistribution>& reference = std::nullopt,
    const std::string& reference_name = "reference") {
  plan.validate();
  if (models.empty()) throw std::invalid_argument("model grid is empty");
  std::optional<EmpiricalDistribution> ref;
  if (reference) ref = snap_reference_to_grid(*reference, plan.bin_width);

  GridResult out;
  out.reference_name = reference_name;
  for (std::size_t arm = 0; arm < models.size(); ++arm) {
    const auto& model = models[arm];
    const std::vector<double> waits = simulate_model_waits(model, plan, arm);
    GridModelResult r;
    r.model = model;
    r.warmup = resolve_warmup(plan, model.rho());
    r.distribution = histogram(waits, plan.bin_width);
    r.mean_wait = mean_with_batch_se(waits);
    if (model.poisson && model.service.family == ServiceFamily::Deterministic)
      r.pk_reference = md1_mean_wait(model.rho());
    out.models.push_back(std::move(r));
  }

  if (ref) {
    for (const auto& m : out.models) {
      EmpiricalDistribution a = m.distribution;
      EmpiricalDistribution b = *ref;
      align_grids(a, b);
      out.distances.push_back({m.model.name, total_variation(a, b), hellinger(a, b),
                               plan.bin_width, m.distribution.sample_count});
    }
  }
  return out;
}

inline nlohmann::json to_json(const GridResult& grid, const SimulationPlan& plan) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& m : grid.models) {
    nlohmann::json j{{"model", to_json(m.model)},
                     {"warmup", m.warmup},
                     {"mean_wait_service_units", m.mean_wait.mean},
                     {"mean_wait_std_error", m.mean_wait.std_error},
                     {"n_samples", m.distribution.sample_count},
                     {"distribution", to_json(m.distribution)}};
    if (m.pk_reference) j["pollaczek_khinchine_mean_wait"] = *m.pk_reference;
    models.push_back(std::move(j));
  }
  nlohmann::json j{{"config", to_json(plan, 0)}, {"models", std::move(models)}};
  j["config"].erase("warmup_per_replication");  // warm-up is per arm here
  if (!grid.distances.empty()) {
    nlohmann::json ds = nlohmann::json::array();
    for (const auto& d : grid.distances)
      ds.push_back({{"model", d.model},
                    {"tv", d.tv},
                    {"hellinger", d.hellinger},
                    {"bin_width", d.bin_width},
                    {"n_samples", d.n_samples}});
    j["distances"] = std::move(ds);
    j["reference"] = grid.reference_name;
  }
  return j;
}

struct RobustnessResult {
  std::vector<DelayFamily> families;
  std::vector<EmpiricalDistribution> distributions;
  std::vector<std::vector<double>> tv_matrix;  // symmetric, zero diagonal
};

// Fixes sigma and sweeps the delay family; the paper-level claim is that the
// wait distribution depends on the delay law only through sigma, so all
// pairwise TV entries should be small.
inline RobustnessResult run_robustness(const std::vector<DelayFamily>& families,
                                       double sigma, double lambda, double gamma,
                                       const ServiceSpec& service,
                                       const SimulationPlan& plan) {
  if (families.empty()) throw std::invalid_argument("robustness sweep needs >= 1 family");
  RobustnessResult out;
  out.families = families;
  for (std::size_t arm = 0; arm < families.size(); ++arm) {
    ModelSpec model{std::string("psra_") + to_string(families[arm]), false, lambda,
                    gamma, DelaySpec{families[arm], sigma}, service};
    out.distributions.push_back(
        histogram(simulate_model_waits(model, plan, arm), plan.bin_width));
  }

  const std::size_t n = families.size();
  out.tv_matrix.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      EmpiricalDistribution pa = out.distributions[a];
      EmpiricalDistribution pb = out.distributions[b];
      align_grids(pa, pb);
      out.tv_matrix[a][b] = out.tv_matrix[b][a] = total_variation(pa, pb);
    }
  return out;
}

inline nlohmann::json to_json(const RobustnessResult& r, double sigma,
                              const ServiceSpec& service, double lambda, double gamma,
                              const SimulationPlan& plan) {
  nlohmann::json families = nlohmann::json::array();
  for (auto f : r.families) families.push_back(to_string(f));
  nlohmann::json dists = nlohmann::json::array();
  for (std::size_t k = 0; k < r.distributions.size(); ++k)
    dists.push_back({{"family", to_string(r.families[k])},
                     {"distribution", to_json(r.distributions[k])}});
  return nlohmann::json{
      {"config",
       {{"sigma", sigma},
        {"lambda", lambda},
        {"gamma", gamma},
        {"service", to_string(service.family)},
        {"service_mean", service.mean},
        {"plan", to_json(plan, resolve_warmup(plan, gamma))}}},
      {"families", std::move(families)},
      {"pairwise_tv", r.tv_matrix},
      {"distributions", std::move(dists)}};
}

struct PoissonLimitRow {
  double sigma = 0.0;
  double mu = 0.0;  // Poisson mean gamma * lambda * T
  TvEstimate tv;
};

// Distribution of the count in the slot (0, T] across replications, against
// the Poisson law of matching mean, for each sigma on the ladder. As sigma
// grows the PSRA count law converges to Poisson and TV falls to 0.
inline std::vector<PoissonLimitRow> run_poisson_limit(
    double lambda, double gamma, DelayFamily family, const std::vector<double>& sigmas,
    double slot_T, std::size_t replications, std::uint64_t master_seed,
    double eps = kDefaultTruncationEps) {
  if (sigmas.empty()) throw std::invalid_argument("poisson limit needs a sigma ladder");
  if (replications < 1) throw std::invalid_argument("need replications >= 1");
  if (!(slot_T > 0.0)) throw std::invalid_argument("slot length must be > 0");

  std::vector<PoissonLimitRow> rows;
  for (std::size_t arm = 0; arm < sigmas.size(); ++arm) {
    const ProcessSpec spec{lambda, DelaySpec{family, sigmas[arm]}, gamma,
                           Interval{0.0, slot_T}};
    spec.validate();
    std::vector<std::size_t> counts(replications);
    detail::parallel_for(replications, [&](std::size_t r) {
      const ArrivalStream s = generate_psra(
          spec, master_seed, detail::arm_stream_base(arm) + r, eps);
      counts[r] = s.size();
    });
    std::vector<double> pmf;
    for (std::size_t c : counts) {
      if (c >= pmf.size()) pmf.resize(c + 1, 0.0);
      pmf[c] += 1.0;
    }
    for (double& m : pmf) m /= static_cast<double>(replications);

    PoissonLimitRow row;
    row.sigma = sigmas[arm];
    row.mu = gamma * lambda * slot_T;
    row.tv = tv_to_poisson(pmf, row.mu, replications);
    rows.push_back(row);
  }
  return rows;
}

inline nlohmann::json to_json(const std::vector<PoissonLimitRow>& rows, double lambda,
                              double gamma, DelayFamily family, double slot_T,
                              std::size_t replications, std::uint64_t master_seed) {
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : rows)
    rs.push_back({{"sigma", r.sigma},
                  {"poisson_mean", r.mu},
                  {"tv", r.tv.tv},
                  {"tv_std_error", r.tv.std_error}});
  return nlohmann::json{{"config",
                         {{"lambda", lambda},
                          {"gamma", gamma},
                          {"delay", to_string(family)},
                          {"slot_T", slot_T},
                          {"replications", replications},
                          {"master_seed", master_seed}}},
                        {"rows", std::move(rs)}};
}

struct CovarianceCell {
  double sigma = 0.0;
  double T = 0.0;
  double t = 0.0;
  double analytic = 0.0;
  CovarianceEstimate empirical;
  double z = 0.0;
};

// Validates the analytic slot-count covariance against the Monte Carlo
// estimator on a (sigma, T) grid. z is the standardized disagreement; a
// zero-variance cell (degenerate schedule) scores 0 when both sides agree.
inline std::vector<CovarianceCell> run_covariance_check(
    double lambda, double gamma, DelayFamily family, const std::vector<double>& sigmas,
    const std::vector<double>& slot_Ts, std::size_t replications,
    std::uint64_t master_seed, double eps = kDefaultTruncationEps, double slot_t = 0.0) {
  if (replications < 2) throw std::invalid_argument("need replications >= 2");
  std::vector<CovarianceCell> cells;
  std::size_t arm = 0;
  for (double sigma : sigmas)
    for (double T : slot_Ts) {
      const SlotPair slots{slot_t, T};
      const ProcessSpec spec{lambda, DelaySpec{family, sigma}, gamma,
                             Interval{slot_t, slots.second_hi()}};
      spec.validate();

      std::vector<ArrivalStream> streams(replications);
      detail::parallel_for(replications, [&](std::size_t r) {
        streams[r] = generate_psra(spec, master_seed,
                                   detail::arm_stream_base(arm) + r, eps);
      });

      CovarianceCell cell;
      cell.sigma = sigma;
      cell.T = T;
      cell.t = slot_t;
      cell.analytic = analytic_covariance(spec, slots, eps);
      cell.empirical = empirical_covariance(streams, slots);
      const double diff = std::abs(cell.empirical.estimate - cell.analytic);
      cell.z = cell.empirical.std_error > 0.0 ? diff / cell.empirical.std_error
                                              : (diff < 1e-12 ? 0.0 : INFINITY);
      cells.push_back(cell);
      ++arm;
    }
  return cells;
}

inline nlohmann::json to_json(const std::vector<CovarianceCell>& cells, double lambda,
                              double gamma, DelayFamily family, std::size_t replications,
                              std::uint64_t master_seed) {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : cells)
    cs.push_back({{"t", c.t},
                  {"T", c.T},
                  {"sigma", c.sigma},
                  {"analytic", c.analytic},
                  {"empirical", c.empirical.estimate},
                  {"std_error", c.empirical.std_error},
                  {"z", c.z},
                  {"replications", c.empirical.replications}});
  return nlohmann::json{{"config",
                         {{"lambda", lambda},
                          {"gamma", gamma},
                          {"delay", to_string(family)},
                          {"replications", replications},
                          {"master_seed", master_seed}}},
                        {"cells", std::move(cs)}};
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << content;
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace psra
