#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "oscbo/gp.hpp"
#include "oscbo/losses.hpp"
#include "oscbo/online.hpp"
#include "oscbo/optim.hpp"
#include "oscbo/rng.hpp"

namespace oscbo::baselines {

/// Hyperparameter policies. `FixedKernel` keeps one lengthscale throughout; it
/// is the reference GP-UCB used by the coverage and regret-envelope checks.
enum class Method { Oscbo, OscboL1, GpUcbMll, Ocbo, AGpUcb, FixedKernel };

Method parse_method(std::string_view s);
std::string_view to_string(Method m);

/// θ₀ / g_t floored at θ_min, with g_t = 1 for t <= t₀ and √t afterwards.
double agp_ucb_lengthscale(double theta0, int t, int t0, double theta_min);

struct LooPrediction {
  double mean = 0.0;
  double var = 0.0;  // observation-level: includes the noise variance
};

/// Leave-one-out predictive distributions from the precision matrix of
/// K + σ²I: μ₋ᵢ = yᵢ - [K_y⁻¹y]ᵢ/[K_y⁻¹]ᵢᵢ, s²₋ᵢ = 1/[K_y⁻¹]ᵢᵢ.
/// Throws InvalidArgument for fewer than two points.
std::vector<LooPrediction> loo_predictive(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                          const gp::KernelSpec& spec, double noise_var);

/// ⌈p·n⌉-th order statistic (1-based), n >= 1.
double nearest_rank_quantile(std::vector<double> values, double p);

struct OcboLevel {
  double q = 0.0;
  double multiplier = 0.0;  // Φ⁻¹(q)
  bool calibrated = false;  // false when fewer than kOcboMinCalibration points
};

inline constexpr int kOcboMinCalibration = 3;

/// PIT values uᵢ = Φ((yᵢ - μ₋ᵢ)/s₋ᵢ), q = nearest-rank (1-δ)-quantile clamped
/// into [0.5 + 1e-6, 1 - 1e-6].
OcboLevel ocbo_recalibrate(std::span<const LooPrediction> loo, const Eigen::VectorXd& y,
                           double delta);

struct PolicyConfig {
  Method method = Method::Oscbo;
  optim::Box domain = optim::Box::uniform(1, 0.01, 10.0);
  gp::Smoothness nu = gp::Smoothness::FiveHalves;
  double noise_var = 0.01;
  optim::OptimizerConfig mll{.lr = 0.01, .steps = 50, .space = optim::SearchSpace::Log};
  online::FtplConfig ftpl{};
  double omd_step = 0.001;
  double rho_hat = 0.5;
  double delta = 0.1;
  int horizon = 100;
  online::ViolationBudget budget{};
  bool literal_recovery = false;
  int agp_t0 = 5;
  double agp_theta_min = 1e-4;
  std::optional<Eigen::VectorXd> fixed_lengthscale;  // FixedKernel only
};

/// OSCBO payload: the primal and dual learners and the phase switch.
struct OscboState {
  online::FtplLearner primal;
  online::OmdDual dual;
  online::PhaseController controller;
};

struct RefitState {
  Eigen::VectorXd theta;
  std::optional<OcboLevel> level;  // OCBO only
};

struct ScheduleState {
  Eigen::VectorXd theta0;
  int t0 = 5;
  double theta_min = 1e-4;
  Eigen::VectorXd theta;
};

struct FixedState {
  Eigen::VectorXd theta;
};

/// What a policy decided for the current round.
struct RoundPlan {
  Eigen::VectorXd theta;
  double lambda = 0.0;                  // multiplier played (OSCBO), else 0
  online::Phase phase = online::Phase::Play;
  bool reinitialized = false;           // learners were reset this round
  double ucb_multiplier = 0.0;          // coefficient on the latent σ in UCB
};

/// Per-run hyperparameter policy.
class Policy {
 public:
  /// `initial` is the standardized initial design D₀. The A-GP-UCB θ₀ is
  /// fitted on it here.
  Policy(PolicyConfig cfg, const gp::Dataset& initial, int p);

  /// Round t (1-based) on data D_{t-1}. `beta` is β_t. Runs the phase check,
  /// chooses θ, and for OCBO refreshes the calibrated level.
  RoundPlan plan(int t, const gp::Dataset& data, double beta, Rng& rng);

  /// Feeds the round's sharpness/calibration back (OSCBO learners and V_t).
  void observe(const losses::RoundFeedback& fb);

  const PolicyConfig& config() const { return cfg_; }
  Method method() const { return cfg_.method; }
  int p() const { return p_; }
  bool is_oscbo() const { return std::holds_alternative<OscboState>(state_); }
  const OscboState* oscbo() const { return std::get_if<OscboState>(&state_); }
  const RefitState* refit() const { return std::get_if<RefitState>(&state_); }
  const ScheduleState* schedule() const { return std::get_if<ScheduleState>(&state_); }
  int mll_refits() const { return mll_refits_; }

 private:
  Eigen::VectorXd refit_mll(const gp::Dataset& data, const Eigen::VectorXd& init);

  PolicyConfig cfg_;
  int p_;
  std::variant<OscboState, RefitState, ScheduleState, FixedState> state_;
  int mll_refits_ = 0;
};

/// The lengthscale for round t; `policy.plan(...).theta`.
Eigen::VectorXd policy_next_theta(Policy& policy, const gp::Dataset& data, int t, double beta,
                                  Rng& rng);

}  // namespace oscbo::baselines
