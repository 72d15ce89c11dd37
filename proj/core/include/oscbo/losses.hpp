#pragma once

#include <functional>
#include <optional>
#include <span>

#include <Eigen/Core>

#include "oscbo/gp.hpp"

namespace oscbo::losses {

/// Normalized log scaled predictive variance:
/// log(1 + latent_var/noise_var) / log(1 + 1/noise_var). Equals 1 at the prior
/// variance when the output scale is 1.
double sharpness_loss(double latent_var, double noise_var);

/// |y - mean|^p / (√β·√(latent_var + noise_var))^p - 1. Non-positive exactly
/// when y falls inside the observation-level interval. p ∈ {1, 2}.
double calibration_constraint(double y, double mean, double latent_var, double noise_var,
                              double beta, int p);

/// Full observation-level interval width 2√β·√(latent_var + noise_var).
double ci_width(double latent_var, double noise_var, double beta);

/// Exploration scale β_t.
///
/// Fixed mode returns `fixed_value` for every round. Theoretical mode returns
/// (B + R√(2(Γ_{t-1} + 1 + log_cover + log(6/δ))))², with Γ supplied by
/// `gamma_fn` and the covering-number term supplied as `log_cover`.
struct BetaSchedule {
  enum class Mode { Fixed, Theoretical };

  Mode mode = Mode::Fixed;
  double fixed_value = 2.0;
  std::optional<double> rkhs_bound;   // B
  std::optional<double> noise_proxy;  // R
  std::optional<double> delta;
  std::optional<double> log_cover;
  std::function<double(int)> gamma_fn;

  static BetaSchedule fixed(double beta = 2.0);
  static BetaSchedule theoretical(double rkhs_bound, double noise_proxy, double delta,
                                  double log_cover, std::function<double(int)> gamma_fn);

  /// t >= 1. Throws ConfigError when theoretical parameters are missing.
  double value(int t) const;
};

double beta_value(const BetaSchedule& sched, int t);

struct CoverageCounter {
  long covered = 0;
  long total = 0;

  void update(bool hit) {
    ++total;
    if (hit) ++covered;
  }
  double rate() const { return total == 0 ? 0.0 : static_cast<double>(covered) / total; }
};

/// What one BO round reports to the online learners.
struct RoundFeedback {
  double sharpness = 0.0;
  double calibration = 0.0;
  bool covered = false;  // always calibration <= 0
  double ci_width = 0.0;
  double beta = 0.0;
};

/// Feedback for a standardized observation `y` against the pre-update
/// prediction at the queried point.
RoundFeedback round_feedback(double y, const gp::Prediction& pred, double noise_var, double beta,
                             int p);

/// Function-level coverage: |f - mean| <= √β·σ (latent width, no noise term).
bool function_covered(double f, const gp::Prediction& pred, double beta);

/// Greedy lower bound on the maximum information gain over `candidates`
/// (rows, unit cube): repeatedly adds the candidate with the largest
/// ½log(1 + σ⁻²σ²_A(x)). Ties go to the lowest index. Throws InvalidArgument
/// when t exceeds the number of candidates or t < 1.
double greedy_information_gain(const gp::KernelSpec& spec, const Eigen::MatrixXd& candidates,
                               int t, double noise_var);

/// √(T·Σ_t 4β_t σ² C log(1 + σ⁻²·latent_var_t)) with C = σ⁻²/log(1 + σ⁻²).
double cor1_bound(std::span<const double> betas, std::span<const double> latent_vars,
                  double noise_var);

}  // namespace oscbo::losses
