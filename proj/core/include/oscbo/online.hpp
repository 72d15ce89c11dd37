#pragma once

#include <limits>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "oscbo/gp.hpp"
#include "oscbo/optim.hpp"
#include "oscbo/rng.hpp"

namespace oscbo::online {

/// max(rho_hat / 2, T^{-1/4}).
double rho_tilde(double rho_hat, int horizon);

/// √(8t·log(18t²/η)).
double concentration_term(int t, double eta);

/// Scaling of the play-phase violation budget. The abstract primal and dual
/// regret bounds are instantiated as c_p√(T log T) and c_d√T; `kappa` scales
/// the whole budget. kappa = +inf disables recovery; kappa = 0 switches as
/// soon as V_t > (T - t)ρ̃ - 1.
struct ViolationBudget {
  double c_p = 1.0;
  double c_d = 1.0;
  double kappa = 1.0;
};

/// κ·[(2/ρ̃)√T + (2 + 3/ρ̃)E_{T,η} + (1 + 2/ρ̃)c_p√(T log T) + (1/ρ̃)c_d√T].
double m_rho(double rho_tilde, int horizon, double eta, double c_p, double c_d, double kappa);
inline double m_rho(double rho_tilde, int horizon, double eta, const ViolationBudget& b) {
  return m_rho(rho_tilde, horizon, eta, b.c_p, b.c_d, b.kappa);
}

/// Cumulative Lagrangian utility of the primal learner as a function of the
/// lengthscale, in closed form over one factorization of K_θ + σ²I:
///
///   Σ_j L_j^s(θ) + λ_{j-1}·L_j^c(θ) - ⟨η, θ⟩
///
/// The last `lambdas.size()` rows of X are loss rounds; any earlier rows are
/// a conditioning prefix (initial design, or rounds before a learner reset).
/// For loss row j the sharpness term is log(L_jj²/σ²)/log(1 + σ⁻²) and the
/// calibration term uses z = L⁻¹y scaled by 1/√β_j.
double ftpl_objective(const Eigen::VectorXd& theta, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y_std, std::span<const double> lambdas,
                      std::span<const double> betas, double noise_var, int p,
                      const Eigen::VectorXd& perturbation,
                      gp::Smoothness nu = gp::Smoothness::FiveHalves);

struct FtplConfig {
  optim::OptimizerConfig oracle{.lr = 0.01, .steps = 50, .space = optim::SearchSpace::Log};
  double perturbation_std = 0.1;
  gp::Smoothness nu = gp::Smoothness::FiveHalves;
  double noise_var = 0.01;
};

/// Follow-the-perturbed-leader over the lengthscale box.
///
/// Histories hold λ_{j-1} and β_j for every loss round observed since the last
/// reset; `first_row` is the data row of the first such round.
class FtplLearner {
 public:
  FtplLearner(optim::Box domain, int p, FtplConfig cfg, std::pair<double, double> utility_range,
              Eigen::Index first_row);

  /// Draws a fresh perturbation, then minimizes the perturbed cumulative
  /// objective by warm-started Adam in log-lengthscale coordinates. With no
  /// history returns the domain's geometric center. If the warm start cannot
  /// be evaluated the previous lengthscale is kept and `fallbacks()` grows.
  /// Requires X.rows() == first_row() + rounds().
  Eigen::VectorXd next(const Eigen::MatrixXd& X, const Eigen::VectorXd& y_std, Rng& rng);

  /// Records the feedback of the round just played.
  void observe(double lambda_played, double beta, double utility);

  /// Fresh learner for a new phase, starting at data row `first_row`.
  void reset(std::pair<double, double> utility_range, Eigen::Index first_row);

  const optim::Box& domain() const { return domain_; }
  const Eigen::VectorXd& current() const { return current_; }
  const Eigen::VectorXd& perturbation() const { return perturbation_; }
  std::span<const double> lambda_history() const { return lambdas_; }
  std::span<const double> beta_history() const { return betas_; }
  std::span<const double> utilities() const { return utilities_; }
  std::pair<double, double> utility_range() const { return utility_range_; }
  Eigen::Index first_row() const { return first_row_; }
  Eigen::Index rounds() const { return static_cast<Eigen::Index>(lambdas_.size()); }
  int p() const { return p_; }
  int fallbacks() const { return fallbacks_; }
  /// Perturbed objective value at the last returned point and at its warm start.
  double last_value() const { return last_value_; }
  double last_warm_value() const { return last_warm_value_; }

 private:
  optim::Box domain_;
  int p_;
  FtplConfig cfg_;
  std::pair<double, double> utility_range_;
  Eigen::Index first_row_;
  std::vector<double> lambdas_;
  std::vector<double> betas_;
  std::vector<double> utilities_;
  Eigen::VectorXd current_;
  Eigen::VectorXd perturbation_;
  int fallbacks_ = 0;
  double last_value_ = 0.0;
  double last_warm_value_ = 0.0;
};

/// One negative-entropy mirror step on the multiplier:
/// min(λ·exp(ω·L^c), cap). The dual utility gradient is -L^c.
double omd_update(double lambda, double calibration, double step, double cap);

/// Online mirror descent on λ ∈ (0, cap].
class OmdDual {
 public:
  OmdDual(double cap, double lambda0 = 1.0, double step = 0.001);

  double lambda() const { return lambda_; }
  double cap() const { return cap_; }
  double step() const { return step_; }

  void observe(double calibration);
  /// New domain (0, cap]; λ restarts at min(lambda0, cap).
  void reset(double cap, double lambda0 = 1.0);

 private:
  double lambda_;
  double cap_;
  double step_;
};

/// Primal utility u = L^s + λ_{t-1}·L^c, then the dual step with L^c. The
/// primal stores the λ it was played against before the dual moves.
void recalibrate(FtplLearner& primal, OmdDual& dual, double sharpness, double calibration,
                 double beta);

enum class Phase { Play, Recovery };
std::string_view to_string(Phase phase);

struct PhaseSignal {
  Phase phase = Phase::Play;
  bool reinitialize = false;
};

double violation_update(double violation, double calibration);

/// Play/recovery switch on the signed cumulative violation V_t.
class PhaseController {
 public:
  /// `literal` re-signals reinitialization on every round the switch condition
  /// holds instead of latching after the first.
  PhaseController(double rho_hat, int horizon, double delta, ViolationBudget budget,
                  bool literal = false);

  /// Round t in [1, T]. Switches to Recovery when V_t > (T - t)ρ̃ + M - 1.
  PhaseSignal check(int t);
  void add_violation(double calibration);

  Phase phase() const { return phase_; }
  bool switched() const { return switched_; }
  double violation() const { return violation_; }
  double violation_plus() const { return violation_plus_; }
  double rho_hat() const { return rho_hat_; }
  double rho_tilde() const { return rho_tilde_; }
  double budget() const { return budget_; }
  double eta() const { return eta_; }
  int horizon() const { return horizon_; }

 private:
  double rho_hat_;
  int horizon_;
  double eta_;
  double rho_tilde_;
  double budget_;
  bool literal_;
  Phase phase_ = Phase::Play;
  bool switched_ = false;
  double violation_ = 0.0;
  double violation_plus_ = 0.0;
};

}  // namespace oscbo::online
