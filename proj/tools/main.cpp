#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oscbo/error.hpp"
#include "oscbo/harness.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace oscbo;

namespace {

struct RunFlags {
  std::string task = "hartmann3";
  std::string method = "oscbo";
  std::uint64_t seed = 0;
  int rounds = 100;
  int init = 10;
  int p = 2;
  double delta = 0.1;
  double rho_hat = 0.5;
  double beta = 2.0;
  std::string acq = "ucb";
  std::string kappa = "1";
  double c_p = 1.0;
  double c_d = 1.0;
  std::string out = ".";
  std::string data;
  double noise_std = 0.0;
  bool wall_clock = false;
  bool ard = false;
  bool literal_recovery = false;
  double lengthscale = 0.0;
  std::string config;
};

double parse_kappa(const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw ConfigError("kappa: cannot parse '" + s + "'");
  return v;
}

std::string normalize_key(std::string k) {
  for (auto& c : k) {
    if (c == '-') c = '_';
  }
  return k;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
}

void add_run_options(CLI::App* app, RunFlags& f) {
  app->add_option("--task", f.task, "Task name");
  app->add_option("--method", f.method, "oscbo|oscbo-l1|gp-ucb-mll|ocbo|a-gp-ucb|gp-ucb-fixed");
  app->add_option("--seed", f.seed, "Run seed");
  app->add_option("--rounds", f.rounds, "BO rounds T");
  app->add_option("--init", f.init, "Initial design size");
  app->add_option("--p", f.p, "Calibration exponent (1 or 2)");
  app->add_option("--delta", f.delta, "Miscoverage level");
  app->add_option("--rho-hat", f.rho_hat, "Feasibility margin lower bound");
  app->add_option("--beta", f.beta, "Fixed exploration scale");
  app->add_option("--acq", f.acq, "ucb|logei");
  app->add_option("--kappa", f.kappa, "Violation budget scale (number or inf)");
  app->add_option("--c-p", f.c_p, "Primal regret constant in the budget");
  app->add_option("--c-d", f.c_d, "Dual regret constant in the budget");
  app->add_option("--out", f.out, "Output directory");
  app->add_option("--data", f.data, "CSV table for tabular tasks");
  app->add_option("--noise-std", f.noise_std, "Additive observation noise std");
  app->add_flag("--wall-clock", f.wall_clock, "Record elapsed time in wall_ms");
  app->add_flag("--ard", f.ard, "One lengthscale per input dimension");
  app->add_flag("--literal-recovery", f.literal_recovery,
                "Reset the learners on every round the switch condition holds");
  app->add_option("--lengthscale", f.lengthscale, "Lengthscale for gp-ucb-fixed");
}

/// Fills flags that were not given on the command line from the config file.
void apply_config(const json& j, CLI::App* app, RunFlags& f, const std::vector<std::string>& extra_keys) {
  auto given = [&](const std::string& opt) { return app->count("--" + opt) > 0; };
  for (const auto& [raw_key, v] : j.items()) {
    const std::string key = normalize_key(raw_key);
    std::string opt = key;
    for (auto& c : opt) {
      if (c == '_') c = '-';
    }
    if (std::find(extra_keys.begin(), extra_keys.end(), key) != extra_keys.end()) continue;
    if (app->get_option_no_throw("--" + opt) == nullptr) {
      throw ConfigError("config: unknown key '" + raw_key + "'");
    }
    if (given(opt)) continue;
    try {
      if (key == "task") f.task = v.get<std::string>();
      else if (key == "method") f.method = v.get<std::string>();
      else if (key == "seed") f.seed = v.get<std::uint64_t>();
      else if (key == "rounds") f.rounds = v.get<int>();
      else if (key == "init") f.init = v.get<int>();
      else if (key == "p") f.p = v.get<int>();
      else if (key == "delta") f.delta = v.get<double>();
      else if (key == "rho_hat") f.rho_hat = v.get<double>();
      else if (key == "beta") f.beta = v.get<double>();
      else if (key == "acq") f.acq = v.get<std::string>();
      else if (key == "kappa") f.kappa = v.is_string() ? v.get<std::string>() : harness::format_double(v.get<double>());
      else if (key == "c_p") f.c_p = v.get<double>();
      else if (key == "c_d") f.c_d = v.get<double>();
      else if (key == "out") f.out = v.get<std::string>();
      else if (key == "data") f.data = v.get<std::string>();
      else if (key == "noise_std") f.noise_std = v.get<double>();
      else if (key == "wall_clock") f.wall_clock = v.get<bool>();
      else if (key == "ard") f.ard = v.get<bool>();
      else if (key == "literal_recovery") f.literal_recovery = v.get<bool>();
      else if (key == "lengthscale") f.lengthscale = v.get<double>();
      else throw ConfigError("config: key '" + raw_key + "' cannot be set from a file");
    } catch (const json::exception& e) {
      throw ConfigError("config: bad value for '" + raw_key + "': " + e.what());
    }
  }
}

harness::RunConfig to_run_config(const RunFlags& f) {
  harness::RunConfig rc;
  rc.task = f.task;
  if (!f.data.empty()) rc.data = fs::path(f.data);
  rc.method = baselines::parse_method(f.method);
  rc.seed = f.seed;
  rc.rounds = f.rounds;
  rc.n_init = f.init;
  rc.p = f.p;
  rc.delta = f.delta;
  rc.rho_hat = f.rho_hat;
  rc.beta = losses::BetaSchedule::fixed(f.beta);
  rc.acquisition = acq::parse_acquisition(f.acq);
  rc.budget = {f.c_p, f.c_d, parse_kappa(f.kappa)};
  rc.noise_std = f.noise_std;
  rc.wall_clock = f.wall_clock;
  rc.ard = f.ard;
  rc.literal_recovery = f.literal_recovery;
  if (f.lengthscale > 0.0) rc.fixed_lengthscale = f.lengthscale;
  rc.validate();
  return rc;
}

int cmd_run(CLI::App* app, RunFlags& f) {
  if (!f.config.empty()) apply_config(load_json(f.config), app, f, {"config"});
  const harness::RunConfig rc = to_run_config(f);
  const harness::RunResult res = harness::run_single(rc);

  const fs::path dir(f.out);
  const fs::path csv = dir / harness::run_file_name(res.task, res.method, rc.seed);
  harness::write_run_csv(csv, res);
  if (!res.records.empty()) {
    std::ofstream diag(dir / (csv.stem().string() + ".diagnostics.csv"), std::ios::binary);
    harness::diagnostics_emit(diag, res.records);
  }
  if (res.error) {
    std::ofstream err(dir / (csv.stem().string() + ".error.txt"));
    err << *res.error << '\n';
    std::cerr << "run aborted: " << *res.error << '\n';
    return 2;
  }
  const auto& last = res.records.back();
  std::cout << csv.string() << ": simple_regret " << harness::format_double(last.simple_regret)
            << ", cum_regret " << harness::format_double(last.cum_regret) << '\n';
  return 0;
}

int cmd_bench(const std::string& config, const std::string& out, int jobs, bool jobs_given) {
  const json j = load_json(config);
  harness::BenchConfig bc;
  RunFlags base;
  CLI::App dummy;
  add_run_options(&dummy, base);
  apply_config(j, &dummy, base, {"tasks", "methods", "seeds", "jobs", "data", "task", "method", "seed"});
  bc.base = to_run_config(base);
  try {
    bc.tasks = j.at("tasks").get<std::vector<std::string>>();
    bc.methods = j.at("methods").get<std::vector<std::string>>();
    const json& s = j.at("seeds");
    if (s.is_number_integer()) {
      for (std::uint64_t i = 0; i < s.get<std::uint64_t>(); ++i) bc.seeds.push_back(i);
    } else {
      bc.seeds = s.get<std::vector<std::uint64_t>>();
    }
    if (j.contains("data")) {
      for (const auto& [task, path] : j.at("data").items()) bc.data[task] = path.get<std::string>();
    }
    bc.jobs = jobs_given ? jobs : j.value("jobs", 0);
  } catch (const json::exception& e) {
    throw ConfigError("bench config: " + std::string(e.what()));
  }
  const auto rep = harness::run_bench(bc, out, std::cerr);
  for (const auto& r : rep.rows) {
    std::cout << r.task << ' ' << r.method << ": simple " << harness::format_double(r.simple_mean)
              << " +- " << harness::format_double(r.simple_se) << ", rank "
              << harness::format_double(r.rank) << '\n';
  }
  for (const auto& f : rep.failures) std::cerr << "failed: " << f << '\n';
  return rep.failures.empty() ? 0 : 3;
}

int cmd_plot(const std::string& metric, const std::string& out, const std::vector<std::string>& files) {
  std::vector<fs::path> paths(files.begin(), files.end());
  const std::string svg = harness::plot_svg(paths, harness::parse_plot_metric(metric));
  std::ofstream os(out, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + out + "'");
  os << svg;
  return 0;
}

int cmd_oracle_check(const std::string& task, const std::string& data) {
  const tasks::TaskSpec spec = tasks::make_task(task, fs::path(data));
  const auto& o = *spec.oracle;
  const auto& info = tasks::tabular_info(task);
  std::cout << task << ": " << o.designs().rows() << " designs, mode " << tasks::to_string(o.mode())
            << ", optimum " << harness::format_double(o.optimum()) << '\n';
  int mismatches = 0;
  for (int j = 0; j < o.dim(); ++j) {
    const auto [lo, hi] = info.reference_bounds[static_cast<std::size_t>(j)];
    const double l = o.bounds().lower(j), u = o.bounds().upper(j);
    const bool ok = std::abs(l - lo) <= 1e-6 * (1 + std::abs(lo)) && std::abs(u - hi) <= 1e-6 * (1 + std::abs(hi));
    if (!ok) ++mismatches;
    std::cout << "  x" << j + 1 << " [" << harness::format_double(l) << ", "
              << harness::format_double(u) << "] reference [" << harness::format_double(lo) << ", "
              << harness::format_double(hi) << "]" << (ok ? "" : "  MISMATCH") << '\n';
  }
  int bad = 0;
  for (Eigen::Index i = 0; i < o.designs().rows(); ++i) {
    if (o(o.designs().row(i).transpose()) != o.values()(i)) ++bad;
  }
  std::cout << "  stored-design lookups: " << (bad == 0 ? "exact" : std::to_string(bad) + " differ") << '\n';
  return mismatches == 0 && bad == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online sharpness/calibration lengthscale selection for Bayesian optimization"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run one seeded BO experiment");
  add_run_options(run, run_flags);
  run->add_option("--config", run_flags.config, "JSON file with the same keys as the flags");

  std::string bench_config, bench_out = "bench_out";
  int jobs = 0;
  auto* bench = app.add_subcommand("bench", "Run a task x method x seed matrix");
  bench->add_option("--config", bench_config, "JSON bench description")->required();
  bench->add_option("--out", bench_out, "Output directory");
  bench->add_option("--jobs", jobs, "Worker threads (0: all cores)");

  std::string metric = "simple", plot_out = "plot.svg";
  std::vector<std::string> plot_files;
  auto* plot = app.add_subcommand("plot", "Render run CSVs as an SVG");
  plot->add_option("--metric", metric, "simple|cumulative|coverage|lengthscale");
  plot->add_option("--out", plot_out, "SVG path");
  plot->add_option("files", plot_files, "Run CSV files")->required();

  std::string oc_task, oc_data;
  auto* oc = app.add_subcommand("oracle-check", "Build a tabular oracle and report on it");
  oc->add_option("--task", oc_task, "Tabular task name")->required();
  oc->add_option("--data", oc_data, "CSV table")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run, run_flags);
    if (*bench) return cmd_bench(bench_config, bench_out, jobs, bench->count("--jobs") > 0);
    if (*plot) return cmd_plot(metric, plot_out, plot_files);
    if (*oc) return cmd_oracle_check(oc_task, oc_data);
  } catch (const oscbo::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
