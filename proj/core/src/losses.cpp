#include "oscbo/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "oscbo/error.hpp"

namespace oscbo::losses {

double sharpness_loss(double latent_var, double noise_var) {
  return std::log1p(latent_var / noise_var) / std::log1p(1.0 / noise_var);
}

double calibration_constraint(double y, double mean, double latent_var, double noise_var,
                              double beta, int p) {
  if (p != 1 && p != 2) throw InvalidArgument("calibration exponent p must be 1 or 2");
  const double scale = std::sqrt(beta) * std::sqrt(latent_var + noise_var);
  const double r = std::abs(y - mean) / scale;
  return (p == 1 ? r : r * r) - 1.0;
}

double ci_width(double latent_var, double noise_var, double beta) {
  return 2.0 * std::sqrt(beta) * std::sqrt(latent_var + noise_var);
}

BetaSchedule BetaSchedule::fixed(double beta) {
  if (!(beta >= 0.0)) throw ConfigError("fixed beta must be non-negative");
  BetaSchedule s;
  s.fixed_value = beta;
  return s;
}

BetaSchedule BetaSchedule::theoretical(double rkhs_bound, double noise_proxy, double delta,
                                       double log_cover, std::function<double(int)> gamma_fn) {
  BetaSchedule s;
  s.mode = Mode::Theoretical;
  s.rkhs_bound = rkhs_bound;
  s.noise_proxy = noise_proxy;
  s.delta = delta;
  s.log_cover = log_cover;
  s.gamma_fn = std::move(gamma_fn);
  return s;
}

double BetaSchedule::value(int t) const {
  if (t < 1) throw InvalidArgument("beta schedule: round index must be >= 1");
  if (mode == Mode::Fixed) return fixed_value;
  if (!rkhs_bound || !noise_proxy || !delta || !log_cover || !gamma_fn) {
    throw ConfigError("theoretical beta schedule needs B, R, delta, log_cover and gamma_fn");
  }
  if (!(*delta > 0.0 && *delta < 1.0)) throw ConfigError("beta schedule: delta must be in (0,1)");
  const double inner = gamma_fn(t - 1) + 1.0 + *log_cover + std::log(6.0 / *delta);
  const double root = *rkhs_bound + *noise_proxy * std::sqrt(2.0 * inner);
  return root * root;
}

double beta_value(const BetaSchedule& sched, int t) { return sched.value(t); }

RoundFeedback round_feedback(double y, const gp::Prediction& pred, double noise_var, double beta,
                             int p) {
  RoundFeedback fb;
  fb.beta = beta;
  fb.sharpness = sharpness_loss(pred.latent_var, noise_var);
  fb.calibration = calibration_constraint(y, pred.mean, pred.latent_var, noise_var, beta, p);
  fb.covered = fb.calibration <= 0.0;
  fb.ci_width = ci_width(pred.latent_var, noise_var, beta);
  return fb;
}

bool function_covered(double f, const gp::Prediction& pred, double beta) {
  return std::abs(f - pred.mean) <= std::sqrt(beta) * std::sqrt(pred.latent_var);
}

double greedy_information_gain(const gp::KernelSpec& spec, const Eigen::MatrixXd& candidates,
                               int t, double noise_var) {
  const Eigen::Index m = candidates.rows();
  if (t < 1 || t > m) {
    throw InvalidArgument("greedy_information_gain: need 1 <= t <= #candidates (t=" +
                          std::to_string(t) + ", m=" + std::to_string(m) + ")");
  }
  const Eigen::MatrixXd K = gp::kernel_matrix(spec, candidates);
  // Incremental pivoted-Cholesky style update of posterior variances.
  Eigen::VectorXd var = K.diagonal();
  Eigen::MatrixXd V(t, m);  // rows: whitened cross-covariances of selected points
  std::vector<bool> taken(static_cast<std::size_t>(m), false);
  double gain = 0.0;
  for (int s = 0; s < t; ++s) {
    Eigen::Index best = -1;
    double best_var = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!taken[static_cast<std::size_t>(i)] && var(i) > best_var) {
        best_var = var(i);
        best = i;
      }
    }
    taken[static_cast<std::size_t>(best)] = true;
    const double v = std::max(best_var, 0.0);
    gain += 0.5 * std::log1p(v / noise_var);
    // Conditioning on a noisy observation at `best`.
    const double denom = std::sqrt(v + noise_var);
    Eigen::RowVectorXd row = K.row(best);
    for (int r = 0; r < s; ++r) row -= V(r, best) * V.row(r);
    V.row(s) = row / denom;
    var -= V.row(s).transpose().cwiseAbs2();
  }
  return gain;
}

double cor1_bound(std::span<const double> betas, std::span<const double> latent_vars,
                  double noise_var) {
  if (betas.size() != latent_vars.size() || betas.empty()) {
    throw InvalidArgument("cor1_bound: need equal, non-empty beta and variance sequences");
  }
  const double c = (1.0 / noise_var) / std::log1p(1.0 / noise_var);
  double sum = 0.0;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    sum += 4.0 * betas[i] * noise_var * c * std::log1p(latent_vars[i] / noise_var);
  }
  return std::sqrt(static_cast<double>(betas.size()) * sum);
}

}  // namespace oscbo::losses
