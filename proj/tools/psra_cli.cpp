// Command-line front end: simulate queueing models, reproduce the experiment
// suites, reduce flight data, and compare binned distributions. Subcommands
// write CSV/JSON files under --out and exit nonzero with an error JSON on
// stderr when anything fails.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "psra/psra.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> split_list(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(std::stod(item));
  return out;
}

std::vector<psra::DailyWindow> parse_windows(const std::string& text) {
  std::vector<psra::DailyWindow> out;
  for (const auto& item : split_list(text)) {
    const auto dash = item.find('-');
    if (dash == std::string::npos)
      throw std::invalid_argument("window must look like HH:MM-HH:MM: " + item);
    psra::DailyWindow w{psra::parse_time_of_day(item.substr(0, dash)),
                        psra::parse_time_of_day(item.substr(dash + 1))};
    w.validate();
    out.push_back(w);
  }
  return out;
}

// --config files are JSON whose keys mirror the long option names. Values
// act as defaults; explicit command-line flags win.
const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys{
      "arrivals",        "arrivals_per_hour", "bin_width",   "customers",
      "delay",           "entry_points",      "families",    "gamma",
      "input",           "lambda",            "landings_per_hour",
      "models",          "name",              "out",         "reference",
      "replications",    "seed",              "service",     "service_hours",
      "service_mean",    "service_mode",      "sigma",       "sigmas",
      "slot",            "slot_anchor",       "slots",       "trace",
      "truncation_eps",  "unthinned",         "warmup",      "windows"};
  return keys;
}

json load_config(int argc, char** argv) {
  std::string path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc)
      path = argv[i + 1];
    else if (arg.rfind("--config=", 0) == 0)
      path = arg.substr(9);
  }
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  json cfg;
  in >> cfg;
  if (!cfg.is_object()) throw std::runtime_error("config file must hold a JSON object");
  for (const auto& [key, value] : cfg.items())
    if (!known_config_keys().contains(key))
      throw std::runtime_error("unknown config key: " + key);
  return cfg;
}

template <typename T>
T cfg_or(const json& cfg, const std::string& key, T fallback) {
  if (cfg.contains(key)) return cfg.at(key).get<T>();
  return fallback;
}

psra::ModelSpec model_from_json(const json& j, double default_lambda,
                                double default_gamma) {
  psra::ModelSpec m;
  m.name = j.at("name").get<std::string>();
  m.poisson = j.value("arrivals", std::string("psra")) == "poisson";
  m.lambda = j.value("lambda", default_lambda);
  m.gamma = j.value("gamma", default_gamma);
  if (!m.poisson)
    m.delay = psra::DelaySpec{
        psra::delay_family_from_string(j.value("delay", std::string("uniform"))),
        j.value("sigma", 20.0 / m.lambda)};
  const auto service = j.value("service", std::string("deterministic"));
  const double mean = j.value("service_mean", 1.0 / m.lambda);
  if (service == "triangular")
    m.service = psra::ServiceSpec::triangular(mean, j.value("service_mode", 0.8 * mean));
  else
    m.service = psra::ServiceSpec::deterministic(mean);
  m.validate();
  return m;
}

void write_distribution_files(const psra::EmpiricalDistribution& dist, const fs::path& dir,
                              const std::string& stem) {
  psra::write_json_file(dir / (stem + ".json"), psra::to_json(dist));
  std::ostringstream csv;
  psra::write_csv(dist, csv);
  psra::write_text_file(dir / (stem + ".csv"), csv.str());
}

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 1;
  std::string out_dir = "psra_out";
  double bin_width = 0.25;
  std::size_t replications = 1;
  std::size_t customers = 1'000'000;
  std::int64_t warmup = -1;  // -1: default rule
  double lambda = 1.0;
  double gamma = 1.0;
  double truncation_eps = psra::kDefaultTruncationEps;
};

void add_common(CLI::App* cmd, CommonOpts& o, const json& cfg) {
  o.seed = cfg_or<std::uint64_t>(cfg, "seed", o.seed);
  o.out_dir = cfg_or<std::string>(cfg, "out", o.out_dir);
  o.bin_width = cfg_or<double>(cfg, "bin_width", o.bin_width);
  o.replications = cfg_or<std::size_t>(cfg, "replications", o.replications);
  o.customers = cfg_or<std::size_t>(cfg, "customers", o.customers);
  o.warmup = cfg_or<std::int64_t>(cfg, "warmup", o.warmup);
  o.lambda = cfg_or<double>(cfg, "lambda", o.lambda);
  o.gamma = cfg_or<double>(cfg, "gamma", o.gamma);
  o.truncation_eps = cfg_or<double>(cfg, "truncation_eps", o.truncation_eps);

  cmd->add_option("--config", o.config_path, "JSON config file; flags override its keys");
  cmd->add_option("--seed", o.seed, "master seed; all replications derive substreams");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--bin-width", o.bin_width, "histogram bin width in service-time units");
  cmd->add_option("--replications", o.replications, "independent replications");
  cmd->add_option("--customers", o.customers,
                  "customers per replication, after warm-up");
  cmd->add_option("--warmup", o.warmup, "warm-up customers per replication (-1: default)");
  cmd->add_option("--lambda", o.lambda, "schedule / service rate");
  cmd->add_option("--gamma", o.gamma, "retention probability (= traffic intensity)");
  cmd->add_option("--truncation-eps", o.truncation_eps,
                  "schedule index window tail tolerance");
}

psra::SimulationPlan make_plan(const CommonOpts& o) {
  psra::SimulationPlan plan;
  plan.replications = o.replications;
  plan.customers = o.customers;
  if (o.warmup >= 0) plan.warmup = static_cast<std::size_t>(o.warmup);
  plan.bin_width = o.bin_width;
  plan.master_seed = o.seed;
  plan.truncation_eps = o.truncation_eps;
  return plan;
}

int cmd_simulate(const CommonOpts& o, const std::string& name, const std::string& arrivals,
                 const std::string& delay, double sigma, const std::string& service,
                 double service_mean, double service_mode, bool dump_trace) {
  psra::ModelSpec model;
  model.name = name;
  model.poisson = arrivals == "poisson";
  model.lambda = o.lambda;
  model.gamma = o.gamma;
  if (!model.poisson)
    model.delay = psra::DelaySpec{psra::delay_family_from_string(delay), sigma};
  const double mean = service_mean > 0.0 ? service_mean : 1.0 / o.lambda;
  model.service = service == "triangular"
                      ? psra::ServiceSpec::triangular(
                            mean, service_mode > 0.0 ? service_mode : 0.8 * mean)
                      : psra::ServiceSpec::deterministic(mean);
  model.validate();

  const psra::SimulationPlan plan = make_plan(o);
  const auto waits = psra::simulate_model_waits(model, plan, 0);
  const auto dist = psra::histogram(waits, plan.bin_width);
  const auto mean_wait = psra::mean_with_batch_se(waits);
  const std::size_t warmup = psra::resolve_warmup(plan, model.rho());

  fs::create_directories(o.out_dir);
  write_distribution_files(dist, o.out_dir, "distribution");

  json result{{"model", psra::to_json(model)},
              {"config", psra::to_json(plan, warmup)},
              {"mean_wait_service_units", mean_wait.mean},
              {"mean_wait_std_error", mean_wait.std_error},
              {"n_samples", dist.sample_count}};
  if (model.poisson && model.service.family == psra::ServiceFamily::Deterministic)
    result["pollaczek_khinchine_mean_wait"] = psra::md1_mean_wait(model.rho());
  psra::write_json_file(fs::path(o.out_dir) / "result.json", result);

  if (dump_trace) {
    const auto trace = psra::simulate_model_trace(model, plan, 0, 0);
    std::ostringstream csv;
    psra::write_csv(trace, csv);
    psra::write_text_file(fs::path(o.out_dir) / "trace.csv", csv.str());
  }
  std::cout << result.dump(2) << "\n";
  return 0;
}

int cmd_grid(const CommonOpts& o, const json& cfg, const std::string& reference_path,
             const std::string& reference_name, bool unthinned) {
  std::optional<psra::EmpiricalDistribution> reference;
  if (!reference_path.empty()) reference = psra::load_distribution(reference_path);

  std::vector<psra::ModelSpec> models;
  if (cfg.contains("models")) {
    for (const auto& mj : cfg.at("models"))
      models.push_back(model_from_json(mj, o.lambda, o.gamma));
  } else {
    models = psra::heathrow_panel_models(o.lambda, o.gamma, unthinned);
  }

  const psra::SimulationPlan plan = make_plan(o);
  const auto result = psra::run_model_grid(models, plan, reference, reference_name);

  fs::create_directories(o.out_dir);
  for (const auto& m : result.models)
    write_distribution_files(m.distribution, o.out_dir, m.model.name + "_distribution");
  const json j = psra::to_json(result, plan);
  psra::write_json_file(fs::path(o.out_dir) / "grid_result.json", j);
  if (!result.distances.empty()) {
    json ds = j.at("distances");
    psra::write_json_file(fs::path(o.out_dir) / "distances.json", ds);
    std::cout << ds.dump(2) << "\n";
  } else {
    std::cout << "wrote " << result.models.size() << " model distributions to " << o.out_dir
              << "\n";
  }
  return 0;
}

int cmd_robustness(const CommonOpts& o, const std::string& families_text, double sigma,
                   const std::string& service, double service_mean, double service_mode) {
  std::vector<psra::DelayFamily> families;
  for (const auto& f : split_list(families_text))
    families.push_back(psra::delay_family_from_string(f));

  const double mean = service_mean > 0.0 ? service_mean : 1.0 / o.lambda;
  const psra::ServiceSpec svc =
      service == "triangular"
          ? psra::ServiceSpec::triangular(mean, service_mode > 0.0 ? service_mode : 0.8 * mean)
          : psra::ServiceSpec::deterministic(mean);

  const psra::SimulationPlan plan = make_plan(o);
  const auto result = psra::run_robustness(families, sigma, o.lambda, o.gamma, svc, plan);

  fs::create_directories(o.out_dir);
  for (std::size_t k = 0; k < result.families.size(); ++k)
    write_distribution_files(result.distributions[k], o.out_dir,
                             std::string("psra_") + psra::to_string(result.families[k]) +
                                 "_distribution");
  const json j = psra::to_json(result, sigma, svc, o.lambda, o.gamma, plan);
  psra::write_json_file(fs::path(o.out_dir) / "robustness_result.json", j);
  std::cout << json{{"families", j.at("families")}, {"pairwise_tv", j.at("pairwise_tv")}}
                   .dump(2)
            << "\n";
  return 0;
}

int cmd_poisson_limit(const CommonOpts& o, const std::string& sigmas_text, double slot_T,
                      const std::string& delay) {
  const auto sigmas = parse_double_list(sigmas_text);
  const auto rows = psra::run_poisson_limit(
      o.lambda, o.gamma, psra::delay_family_from_string(delay), sigmas, slot_T,
      o.replications, o.seed, o.truncation_eps);
  const json j = psra::to_json(rows, o.lambda, o.gamma,
                               psra::delay_family_from_string(delay), slot_T,
                               o.replications, o.seed);
  fs::create_directories(o.out_dir);
  psra::write_json_file(fs::path(o.out_dir) / "poisson_limit.json", j);
  std::cout << j.at("rows").dump(2) << "\n";
  return 0;
}

int cmd_covariance(const CommonOpts& o, const std::string& sigmas_text,
                   const std::string& slots_text, const std::string& delay,
                   double slot_anchor) {
  const auto cells = psra::run_covariance_check(
      o.lambda, o.gamma, psra::delay_family_from_string(delay),
      parse_double_list(sigmas_text), parse_double_list(slots_text), o.replications,
      o.seed, o.truncation_eps, slot_anchor);
  const json j = psra::to_json(cells, o.lambda, o.gamma,
                               psra::delay_family_from_string(delay), o.replications,
                               o.seed);
  fs::create_directories(o.out_dir);
  psra::write_json_file(fs::path(o.out_dir) / "covariance_check.json", j);
  std::cout << j.at("cells").dump(2) << "\n";
  return 0;
}

int cmd_ingest(const CommonOpts& o, const std::string& input, const std::string& windows_text,
               const std::string& entry_points_text, double service_hours,
               double arrivals_per_hour, double landings_per_hour) {
  const auto parsed = psra::parse_flights(input);
  const auto windows = parse_windows(windows_text);
  std::set<std::string> entry_points;
  for (const auto& p : split_list(entry_points_text)) entry_points.insert(p);

  const auto filtered = psra::filter_records(parsed.records, windows, entry_points);
  const auto samples = psra::queue_times(filtered);
  if (samples.empty())
    throw std::runtime_error("no flights retained after filtering; nothing to report");

  // queue times in service units, histogrammed like simulator output
  std::vector<double> in_service_units;
  in_service_units.reserve(samples.size());
  for (const auto& s : samples)
    in_service_units.push_back(s.queue_time / (service_hours * 3600.0));
  const auto dist = psra::histogram(in_service_units, o.bin_width);

  fs::create_directories(o.out_dir);
  std::ostringstream csv;
  psra::write_csv(std::span<const psra::QueueSample>(samples), csv);
  psra::write_text_file(fs::path(o.out_dir) / "queue_times.csv", csv.str());
  write_distribution_files(dist, o.out_dir, "distribution");

  json errors = json::array();
  for (const auto& e : parsed.errors)
    errors.push_back({{"line", e.line}, {"message", e.message}});
  json per_entry = json::object();
  for (const auto& s : samples) {
    auto& slot = per_entry[s.entry_point];
    if (slot.is_null()) slot = json{{"count", 0}, {"zero_queue_flights", 0}};
    slot["count"] = slot["count"].get<int>() + 1;
    if (s.queue_time == 0.0)
      slot["zero_queue_flights"] = slot["zero_queue_flights"].get<int>() + 1;
  }

  json report{{"input", input},
              {"rows_parsed", parsed.records.size()},
              {"row_errors", errors},
              {"rows_retained", filtered.size()},
              {"entry_points", per_entry},
              {"config",
               {{"windows", windows_text},
                {"entry_points", entry_points_text},
                {"service_hours", service_hours},
                {"bin_width_service_units", o.bin_width}}}};
  if (arrivals_per_hour > 0.0 && landings_per_hour > 0.0) {
    const double rho = psra::traffic_intensity(arrivals_per_hour, landings_per_hour);
    report["traffic_intensity"] = rho;
    if (rho > 1.0) {
      report["warning"] = "traffic intensity exceeds 1: unstable regime";
      std::cerr << "warning: traffic intensity " << rho << " exceeds 1\n";
    }
  }
  psra::write_json_file(fs::path(o.out_dir) / "ingest_report.json", report);
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_compare(const std::string& path_a, const std::string& path_b,
                const std::string& out_file) {
  auto a = psra::load_distribution(path_a);
  auto b = psra::load_distribution(path_b);
  psra::align_grids(a, b);
  const json j{{"model", fs::path(path_a).stem().string() + "_vs_" +
                             fs::path(path_b).stem().string()},
               {"tv", psra::total_variation(a, b)},
               {"hellinger", psra::hellinger(a, b)},
               {"bin_width", a.bin_edges[1] - a.bin_edges[0]},
               {"n_samples_a", a.sample_count},
               {"n_samples_b", b.sample_count}};
  if (!out_file.empty()) psra::write_json_file(out_file, j);
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    const json cfg = load_config(argc, argv);

    CLI::App app{"Pre-scheduled random arrivals queueing toolkit"};
    app.require_subcommand(1);

    int rc = 0;

    // simulate
    auto* sim = app.add_subcommand("simulate", "simulate one model");
    CommonOpts sim_o;
    add_common(sim, sim_o, cfg);
    std::string sim_name = cfg_or<std::string>(cfg, "name", "model");
    std::string sim_arrivals = cfg_or<std::string>(cfg, "arrivals", "psra");
    std::string sim_delay = cfg_or<std::string>(cfg, "delay", "uniform");
    double sim_sigma = cfg_or<double>(cfg, "sigma", 20.0);
    std::string sim_service = cfg_or<std::string>(cfg, "service", "deterministic");
    double sim_service_mean = cfg_or<double>(cfg, "service_mean", 0.0);
    double sim_service_mode = cfg_or<double>(cfg, "service_mode", 0.0);
    bool sim_trace = cfg_or<bool>(cfg, "trace", false);
    sim->add_option("--name", sim_name, "model name for reports");
    sim->add_option("--arrivals", sim_arrivals, "psra | poisson")
        ->check(CLI::IsMember({"psra", "poisson"}));
    sim->add_option("--delay", sim_delay,
                    "uniform | triangular | normal | exponential | degenerate");
    sim->add_option("--sigma", sim_sigma, "delay standard deviation (time units)");
    sim->add_option("--service", sim_service, "deterministic | triangular")
        ->check(CLI::IsMember({"deterministic", "triangular"}));
    sim->add_option("--service-mean", sim_service_mean, "service mean (default 1/lambda)");
    sim->add_option("--service-mode", sim_service_mode,
                    "triangular mode (default 0.8 * mean)");
    sim->add_flag("--trace", sim_trace, "also write the replication-0 trace CSV");
    sim->callback([&] {
      rc = cmd_simulate(sim_o, sim_name, sim_arrivals, sim_delay, sim_sigma, sim_service,
                        sim_service_mean, sim_service_mode, sim_trace);
    });

    // grid
    auto* grid = app.add_subcommand("grid", "M/D/1 + PSRA comparison panels");
    CommonOpts grid_o;
    grid_o.gamma = 40.0 / 41.0;
    add_common(grid, grid_o, cfg);
    std::string grid_reference = cfg_or<std::string>(cfg, "reference", "");
    std::string grid_reference_name = "reference";
    bool grid_unthinned = cfg_or<bool>(cfg, "unthinned", false);
    grid->add_option("--reference", grid_reference,
                     "distribution JSON to compute TV/Hellinger against");
    grid->add_option("--reference-name", grid_reference_name, "label for the reference");
    grid->add_flag("--unthinned", grid_unthinned,
                   "use the unthinned reading: schedule spacing 1/(gamma*lambda), gamma 1");
    grid->callback([&] {
      rc = cmd_grid(grid_o, cfg, grid_reference, grid_reference_name, grid_unthinned);
    });

    // robustness
    auto* rob = app.add_subcommand("robustness", "delay-family sweep at fixed sigma");
    CommonOpts rob_o;
    rob_o.gamma = 40.0 / 41.0;
    rob_o.bin_width = 1.0;
    add_common(rob, rob_o, cfg);
    std::string rob_families =
        cfg_or<std::string>(cfg, "families", "uniform,triangular,normal,exponential");
    double rob_sigma = cfg_or<double>(cfg, "sigma", 20.0);
    std::string rob_service = cfg_or<std::string>(cfg, "service", "deterministic");
    double rob_service_mean = cfg_or<double>(cfg, "service_mean", 0.0);
    double rob_service_mode = cfg_or<double>(cfg, "service_mode", 0.0);
    rob->add_option("--families", rob_families, "comma-separated delay families");
    rob->add_option("--sigma", rob_sigma, "delay standard deviation (time units)");
    rob->add_option("--service", rob_service, "deterministic | triangular");
    rob->add_option("--service-mean", rob_service_mean, "service mean (default 1/lambda)");
    rob->add_option("--service-mode", rob_service_mode, "triangular mode");
    rob->callback([&] {
      rc = cmd_robustness(rob_o, rob_families, rob_sigma, rob_service, rob_service_mean,
                          rob_service_mode);
    });

    // poisson-limit
    auto* pl = app.add_subcommand("poisson-limit",
                                  "slot-count TV to Poisson along a sigma ladder");
    CommonOpts pl_o;
    pl_o.replications = 100'000;
    add_common(pl, pl_o, cfg);
    std::string pl_sigmas = cfg_or<std::string>(cfg, "sigmas", "1,5,20,50");
    double pl_slot = cfg_or<double>(cfg, "slot", 1.0);
    std::string pl_delay = cfg_or<std::string>(cfg, "delay", "uniform");
    pl->add_option("--sigmas", pl_sigmas, "comma-separated sigma ladder");
    pl->add_option("--slot", pl_slot, "slot length T");
    pl->add_option("--delay", pl_delay, "delay family");
    pl->callback([&] { rc = cmd_poisson_limit(pl_o, pl_sigmas, pl_slot, pl_delay); });

    // covariance
    auto* cov = app.add_subcommand("covariance",
                                   "analytic vs empirical slot-count covariance");
    CommonOpts cov_o;
    cov_o.replications = 100'000;
    add_common(cov, cov_o, cfg);
    std::string cov_sigmas = cfg_or<std::string>(cfg, "sigmas", "1,2,5");
    std::string cov_slots = cfg_or<std::string>(cfg, "slots", "1,2");
    std::string cov_delay = cfg_or<std::string>(cfg, "delay", "uniform");
    double cov_anchor = cfg_or<double>(cfg, "slot_anchor", 0.0);
    cov->add_option("--sigmas", cov_sigmas, "comma-separated sigma grid");
    cov->add_option("--slots", cov_slots, "comma-separated slot lengths T");
    cov->add_option("--delay", cov_delay, "delay family");
    cov->add_option("--slot-anchor", cov_anchor, "left edge t of the first slot");
    cov->callback([&] { rc = cmd_covariance(cov_o, cov_sigmas, cov_slots, cov_delay,
                                            cov_anchor); });

    // ingest
    auto* ing = app.add_subcommand("ingest", "flight CSV to queue-time distribution");
    CommonOpts ing_o;
    add_common(ing, ing_o, cfg);
    std::string ing_input = cfg_or<std::string>(cfg, "input", "");
    std::string ing_windows = cfg_or<std::string>(cfg, "windows", "06:00-10:30,16:00-20:00");
    std::string ing_points = cfg_or<std::string>(cfg, "entry_points", "LOGAN,ALESO,NUGRA");
    double ing_service_hours = cfg_or<double>(cfg, "service_hours", 1.0 / 41.0);
    double ing_arrivals = cfg_or<double>(cfg, "arrivals_per_hour", 0.0);
    double ing_landings = cfg_or<double>(cfg, "landings_per_hour", 0.0);
    ing->add_option("--input", ing_input, "flight CSV path")->required(!cfg.contains("input"));
    ing->add_option("--windows", ing_windows, "daily windows HH:MM-HH:MM[,...]");
    ing->add_option("--entry-points", ing_points, "entry points to keep");
    ing->add_option("--service-hours", ing_service_hours,
                    "service-time unit in hours (default 1/41)");
    ing->add_option("--arrivals-per-hour", ing_arrivals, "average arrivals per hour");
    ing->add_option("--landings-per-hour", ing_landings, "maximum landings per hour");
    ing->callback([&] {
      rc = cmd_ingest(ing_o, ing_input, ing_windows, ing_points, ing_service_hours,
                      ing_arrivals, ing_landings);
    });

    // compare
    auto* cmp = app.add_subcommand("compare", "TV and Hellinger between two distributions");
    std::string cmp_a, cmp_b, cmp_out;
    cmp->add_option("a", cmp_a, "first distribution JSON")->required();
    cmp->add_option("b", cmp_b, "second distribution JSON")->required();
    cmp->add_option("--out", cmp_out, "also write the report to this file");
    cmp->callback([&] { rc = cmd_compare(cmp_a, cmp_b, cmp_out); });

    CLI11_PARSE(app, argc, argv);
    return rc;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"message", e.what()}}}}.dump() << "\n";
    return 1;
  }
}
