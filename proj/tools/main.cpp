// cransim: replay a provisioning day per cluster (run), check the analytic
// coverage model against Monte Carlo simulation (validate), or sweep one
// config parameter and tabulate the elastic-vs-static comparison (sweep).
//
// Exit codes: 0 success; 2 configuration or I/O error; 3 run completed with
// infeasible timesteps; 4 validation found analytic/simulation disagreement.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cransim/cransim.hpp"

namespace fs = std::filesystem;
using namespace cransim;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kPartialInfeasible = 3;
constexpr int kValidationFailure = 4;

Scenario load_scenario_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ScenarioError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return traffic::load_scenario(buf.str());
}

void print_warnings(const Scenario& sc) {
  for (const auto& w : sc.warnings) std::cerr << "warning: " << w << "\n";
}

Scheme parse_scheme(const std::string& s) {
  if (s == "elastic") return Scheme::Elastic;
  if (s == "static") return Scheme::Static;
  return Scheme::Both;
}

analytics::KernelVariant parse_kernel(const std::string& s) {
  return s == "aswritten" ? analytics::KernelVariant::AsWritten
                          : analytics::KernelVariant::Reference;
}

int cmd_run(const std::string& config, const std::string& out_dir,
            const std::string& scheme_flag, int timestep_flag,
            const std::string& kernel_flag, bool emit_gnuplot) {
  Scenario sc = load_scenario_file(config);
  print_warnings(sc);

  const Scheme scheme =
      scheme_flag.empty() ? sc.run.scheme : parse_scheme(scheme_flag);
  const int timestep =
      timestep_flag > 0 ? timestep_flag : sc.run.timestep_minutes;
  if (!kernel_flag.empty()) sc.run.kernel = parse_kernel(kernel_flag);

  const auto rows = runner::run_timeseries(sc, scheme, timestep);

  fs::create_directories(out_dir);
  const fs::path base(out_dir);
  runner::write_csv(rows, (base / "timeseries.csv").string());
  const auto summary = runner::summarize(rows);
  const std::string text = runner::format_summary(summary);
  {
    std::ofstream f(base / "summary.txt", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write summary.txt");
    f << text;
  }
  if (emit_gnuplot)
    runner::write_gnuplot_script(sc, scheme, "timeseries.csv",
                                 (base / "plot.gp").string());

  std::cout << text;
  std::cout << "wrote " << (base / "timeseries.csv").string() << "\n";

  std::size_t infeasible = 0;
  for (const auto& r : rows)
    if (!r.feasible) ++infeasible;
  if (infeasible > 0) {
    std::cerr << infeasible << " of " << rows.size()
              << " timesteps infeasible (demand exceeds deployment)\n";
    return kPartialInfeasible;
  }
  return kOk;
}

int cmd_validate(const std::string& config, std::uint64_t trials,
                 std::uint64_t seed, bool trials_set, bool seed_set) {
  Scenario sc = load_scenario_file(config);
  print_warnings(sc);
  if (trials_set) sc.mc.trials = trials;
  if (seed_set) sc.mc.seed = seed;

  const auto report = runner::validate(sc);
  std::cout << runner::format_validation(report);
  return report.all_reference_ok ? kOk : kValidationFailure;
}

struct SweepParam {
  const char* key;
  void (*apply)(Scenario&, double);
  bool (*valid)(double);
};

const SweepParam kSweepParams[] = {
    {"radio.alpha", [](Scenario& sc, double v) { sc.radio.alpha = v; },
     [](double v) { return v > 2.0; }},
    {"radio.gamma_db",
     [](Scenario& sc, double v) { sc.radio.gamma = std::pow(10.0, v / 10.0); },
     [](double) { return true; }},
    {"radio.noise_w", [](Scenario& sc, double v) { sc.radio.sigma2 = v; },
     [](double v) { return v >= 0.0; }},
    {"constraints.epsilon",
     [](Scenario& sc, double v) { sc.constraints.epsilon = v; },
     [](double v) { return v > 0.0 && v < 1.0; }},
    {"constraints.r_min_bps",
     [](Scenario& sc, double v) { sc.constraints.r_min = v; },
     [](double v) { return v > 0.0; }},
    {"constraints.deadline_us",
     [](Scenario& sc, double v) { sc.constraints.deadline_us = v; },
     [](double v) { return v > 0.0; }},
};

int cmd_sweep(const std::string& config, const std::string& out_dir,
              const std::string& param, double from, double to, int steps) {
  const SweepParam* sp = nullptr;
  for (const auto& p : kSweepParams)
    if (param == p.key) sp = &p;
  if (!sp) {
    std::cerr << "error: unknown sweep parameter '" << param
              << "'; supported:";
    for (const auto& p : kSweepParams) std::cerr << " " << p.key;
    std::cerr << "\n";
    return kConfigError;
  }
  if (steps < 1) {
    std::cerr << "error: --steps must be >= 1\n";
    return kConfigError;
  }

  const Scenario base = load_scenario_file(config);
  print_warnings(base);

  std::ostringstream csv;
  csv << "param,value,cluster_id,elastic_energy_wh,static_energy_wh,"
         "energy_reduction_pct,elastic_peak_mean_w,static_peak_mean_w,"
         "peak_reduction_pct,elastic_offpeak_mean_w,static_offpeak_mean_w,"
         "offpeak_reduction_pct\n";

  bool any_infeasible = false;
  for (int k = 0; k < steps; ++k) {
    const double v =
        steps == 1 ? from : from + (to - from) * static_cast<double>(k) /
                                       (steps - 1);
    if (!sp->valid(v)) {
      std::cerr << "error: " << param << " = " << v
                << " is outside the model's domain\n";
      return kConfigError;
    }
    Scenario sc = base;
    sp->apply(sc, v);
    const auto rows =
        runner::run_timeseries(sc, Scheme::Both, sc.run.timestep_minutes);
    for (const auto& r : rows) any_infeasible = any_infeasible || !r.feasible;
    const auto summary = runner::summarize(rows);
    for (const auto& c : summary.clusters) {
      csv << param << ',' << runner::detail::g6(v) << ',' << c.cluster_id
          << ',' << runner::detail::g6(c.elastic.energy_wh) << ','
          << runner::detail::g6(c.static_scheme.energy_wh) << ','
          << runner::detail::g6(c.energy_reduction_pct) << ','
          << runner::detail::g6(c.elastic.peak_mean_w) << ','
          << runner::detail::g6(c.static_scheme.peak_mean_w) << ','
          << runner::detail::g6(c.peak_reduction_pct) << ','
          << runner::detail::g6(c.elastic.offpeak_mean_w) << ','
          << runner::detail::g6(c.static_scheme.offpeak_mean_w) << ','
          << runner::detail::g6(c.offpeak_reduction_pct) << '\n';
    }
  }

  fs::create_directories(out_dir);
  const fs::path path = fs::path(out_dir) / "sweep.csv";
  {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << csv.str();
  }
  std::cout << "wrote " << path.string() << " (" << steps << " values of "
            << param << ")\n";
  return any_infeasible ? kPartialInfeasible : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"elastic C-RAN provisioning simulator"};
  app.require_subcommand(1);

  std::string config, out_dir = ".", scheme_flag, kernel_flag, param;
  int timestep_flag = 0;
  bool emit_gnuplot = false;
  std::uint64_t trials = 0, seed = 0;
  double from = 0.0, to = 0.0;
  int steps = 1;

  auto* run = app.add_subcommand("run", "replay one day and write CSV + summary");
  run->add_option("--config", config, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--scheme", scheme_flag, "override run.scheme")
      ->check(CLI::IsMember({"elastic", "static", "both"}));
  run->add_option("--timestep-min", timestep_flag,
                  "override run.timestep_minutes")
      ->check(CLI::PositiveNumber);
  run->add_option("--kernel", kernel_flag, "override run.kernel_variant")
      ->check(CLI::IsMember({"aswritten", "reference"}));
  run->add_flag("--emit-gnuplot", emit_gnuplot,
                "also write a gnuplot script next to the CSV");

  auto* validate = app.add_subcommand(
      "validate", "Monte Carlo check of the analytic coverage model");
  validate->add_option("--config", config, "scenario JSON file")->required();
  auto* trials_opt =
      validate->add_option("--trials", trials, "override mc.trials")
          ->check(CLI::PositiveNumber);
  auto* seed_opt = validate->add_option("--seed", seed, "override mc.seed");

  auto* sweep = app.add_subcommand(
      "sweep", "rerun the day across a range of one parameter");
  sweep->add_option("--config", config, "scenario JSON file")->required();
  sweep->add_option("--param", param, "dotted config key to sweep")->required();
  sweep->add_option("--from", from, "first value")->required();
  sweep->add_option("--to", to, "last value")->required();
  sweep->add_option("--steps", steps, "number of values, endpoints included")
      ->required();
  sweep->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (run->parsed())
      return cmd_run(config, out_dir, scheme_flag, timestep_flag, kernel_flag,
                     emit_gnuplot);
    if (validate->parsed())
      return cmd_validate(config, trials, seed, trials_opt->count() > 0,
                          seed_opt->count() > 0);
    if (sweep->parsed())
      return cmd_sweep(config, out_dir, param, from, to, steps);
  } catch (const ScenarioError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;  // unreachable: a subcommand is required
}
