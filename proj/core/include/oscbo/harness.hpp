#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "oscbo/acquisition.hpp"
#include "oscbo/baselines.hpp"
#include "oscbo/losses.hpp"
#include "oscbo/online.hpp"
#include "oscbo/tasks.hpp"

namespace oscbo::harness {

struct RunConfig {
  std::string task = "hartmann3";
  std::optional<std::filesystem::path> data;         // tabular tasks
  std::shared_ptr<const tasks::TaskSpec> task_spec;  // overrides `task` when set
  baselines::Method method = baselines::Method::Oscbo;
  std::uint64_t seed = 0;
  int rounds = 100;
  int n_init = 10;
  int p = 2;  // forced to 1 for oscbo-l1
  double delta = 0.1;
  double rho_hat = 0.5;
  losses::BetaSchedule beta = losses::BetaSchedule::fixed(2.0);
  acq::AcquisitionKind acquisition = acq::AcquisitionKind::Ucb;
  double theta_lower = 0.01;
  double theta_upper = 10.0;
  bool ard = false;
  online::ViolationBudget budget{};
  bool literal_recovery = false;
  double noise_std = 0.0;  // additive observation noise on the task
  double noise_var = 0.01;  // model-side σ²
  gp::Smoothness nu = gp::Smoothness::FiveHalves;
  gp::OutputTransform output = gp::OutputTransform::Standardize;
  std::optional<double> fixed_lengthscale;  // gp-ucb-fixed
  acq::MaximizerConfig maximizer{};
  bool wall_clock = false;

  /// Throws ConfigError on out-of-range settings.
  void validate() const;
  /// The effective calibration exponent.
  int exponent() const;
};

/// One BO round. x and y are in original units; L_s, L_c, ci_width are in
/// standardized units. Fields below the CSV columns are filled by run_single
/// only.
struct RoundRecord {
  int t = 0;
  std::vector<double> x;
  double y = 0.0;
  std::vector<double> theta;
  double lambda = 0.0;
  std::string phase = "none";
  double L_s = 0.0;
  double L_c = 0.0;
  double V = 0.0;
  double V_plus = 0.0;
  bool covered = false;
  double ci_width = 0.0;
  double beta = 0.0;
  double best_y = 0.0;
  double simple_regret = 0.0;
  double cum_regret = 0.0;
  double wall_ms = 0.0;

  double f_value = 0.0;     // noise-free objective at x
  double latent_var = 0.0;  // pre-update posterior variance at x
  double y_std = 0.0;
  double pred_mean = 0.0;
};

struct RunResult {
  std::string task;
  std::string method;
  int dim = 0;
  double optimum = 0.0;
  std::vector<RoundRecord> records;
  std::optional<std::string> error;  // set when the run aborted early
  int mll_refits = 0;
  int acquisitions = 0;
};

/// Seeded initial design, then T rounds of: phase check, lengthscale choice,
/// GP refit, acquisition, evaluation, feedback from the pre-update posterior,
/// learner updates, logging. Numerical failures stop the run and are
/// reported in `error` together with the rounds completed so far.
RunResult run_single(const RunConfig& cfg);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

std::string csv_header(int dim, int theta_dim);
void write_run_csv(std::ostream& os, const std::vector<RoundRecord>& records, int dim,
                   int theta_dim);
void write_run_csv(const std::filesystem::path& path, const RunResult& result);

struct RunLog {
  int dim = 0;
  int theta_dim = 0;
  std::vector<RoundRecord> records;
};

/// Parses a run CSV. Throws IngestionError on malformed rows.
RunLog read_run_csv(std::istream& is);
RunLog read_run_csv(const std::filesystem::path& path);

/// Per-round running coverage, running mean width, V⁺, θ and λ.
void diagnostics_emit(std::ostream& os, const std::vector<RoundRecord>& records);

struct BenchConfig {
  std::vector<std::string> tasks;
  std::vector<std::string> methods;
  std::vector<std::uint64_t> seeds;
  RunConfig base;
  std::map<std::string, std::filesystem::path> data;  // tabular task -> CSV
  int jobs = 0;                                        // 0: hardware threads
};

struct SummaryRow {
  std::string task;
  std::string method;
  int runs = 0;
  double simple_mean = 0.0;
  double simple_se = 0.0;
  double cum_mean = 0.0;
  double cum_se = 0.0;
  double rank = 0.0;  // within task, by mean final simple regret, ties averaged
};

struct BenchReport {
  std::vector<SummaryRow> rows;
  std::map<std::string, double> mean_rank;  // method -> rank averaged over tasks
  std::vector<std::string> failures;        // "task/method/seed: message"
  std::vector<std::string> skipped_tasks;
};

/// File name used for one cell: <task>__<method>__seed<k>.csv.
std::string run_file_name(const std::string& task, const std::string& method, std::uint64_t seed);

/// Runs every cell (in parallel), writes runs/<cell>.csv, then summarizes the
/// files on disk into summary.csv and ranks.csv. Tabular tasks without data
/// are skipped with a warning on `log`.
BenchReport run_bench(const BenchConfig& cfg, const std::filesystem::path& out_dir,
                      std::ostream& log);

/// Reduces run files named by run_file_name. Standard errors use the n-1
/// sample deviation; a single run has SE 0.
BenchReport summarize_runs(const std::vector<std::filesystem::path>& files);
void write_summary(const std::filesystem::path& out_dir, const BenchReport& report);

/// Average ranks (1 = smallest), ties sharing the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& values);

enum class PlotMetric { Simple, Cumulative, Coverage, Lengthscale };
PlotMetric parse_plot_metric(std::string_view s);

/// Values at or below zero are clamped here before taking log10.
inline constexpr double kLogFloor = 1e-12;

/// Standalone SVG with one mean curve and a ±SE band per method. Methods are
/// read from run_file_name-style names, falling back to the file stem.
/// Throws InvalidArgument naming the files when their round counts differ.
std::string plot_svg(const std::vector<std::filesystem::path>& files, PlotMetric metric);

}  // namespace oscbo::harness
