#include "oscbo/online.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oscbo/error.hpp"

namespace oscbo::online {

double rho_tilde(double rho_hat, int horizon) {
  if (!(rho_hat > 0.0 && rho_hat <= 1.0)) throw InvalidArgument("rho_hat must lie in (0, 1]");
  if (horizon < 1) throw InvalidArgument("horizon must be >= 1");
  return std::max(rho_hat / 2.0, std::pow(static_cast<double>(horizon), -0.25));
}

double concentration_term(int t, double eta) {
  if (t < 1 || !(eta > 0.0)) throw InvalidArgument("concentration_term: need t >= 1, eta > 0");
  const double td = static_cast<double>(t);
  const double log_arg = std::log(18.0 * td * td / eta);
  if (log_arg < 0.0) throw InvalidArgument("concentration_term: log argument below 1");
  return std::sqrt(8.0 * td * log_arg);
}

double m_rho(double rho_tilde, int horizon, double eta, double c_p, double c_d, double kappa) {
  if (!(rho_tilde > 0.0)) throw InvalidArgument("m_rho: rho_tilde must be positive");
  if (kappa == 0.0) return 0.0;
  if (std::isinf(kappa)) return std::numeric_limits<double>::infinity();
  const double T = static_cast<double>(horizon);
  const double inv = 1.0 / rho_tilde;
  const double primal_regret = c_p * std::sqrt(T * std::log(T));
  const double dual_regret = c_d * std::sqrt(T);
  return kappa * (2.0 * inv * std::sqrt(T) + (2.0 + 3.0 * inv) * concentration_term(horizon, eta) +
                  (1.0 + 2.0 * inv) * primal_regret + inv * dual_regret);
}

double ftpl_objective(const Eigen::VectorXd& theta, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y_std, std::span<const double> lambdas,
                      std::span<const double> betas, double noise_var, int p,
                      const Eigen::VectorXd& perturbation, gp::Smoothness nu) {
  const Eigen::Index n = X.rows();
  const auto t = static_cast<Eigen::Index>(lambdas.size());
  if (y_std.size() != n) throw InvalidArgument("ftpl_objective: X and y lengths differ");
  if (static_cast<Eigen::Index>(betas.size()) != t || t > n) {
    throw InvalidArgument("ftpl_objective: histories misaligned with data");
  }
  if (p != 1 && p != 2) throw InvalidArgument("ftpl_objective: p must be 1 or 2");
  if (perturbation.size() != theta.size()) {
    throw InvalidArgument("ftpl_objective: perturbation dimension differs from lengthscale");
  }

  const gp::KernelSpec spec{nu, theta, 1.0};
  const double perturb = perturbation.dot(theta);
  if (t == 0) return -perturb;

  const gp::CholeskyFactor f = gp::factorize_with_jitter(gp::kernel_matrix(spec, X), noise_var);
  const Eigen::VectorXd z = f.L.triangularView<Eigen::Lower>().solve(y_std);
  const Eigen::Index prefix = n - t;
  const double log_noise = std::log(noise_var);

  double sharp = 0.0;
  double calib = 0.0;
  for (Eigen::Index j = 0; j < t; ++j) {
    const Eigen::Index row = prefix + j;
    const double l = f.L(row, row);
    sharp += 2.0 * std::log(l) - log_noise;
    const double r = std::abs(z(row)) / std::sqrt(betas[static_cast<std::size_t>(j)]);
    const double lambda = lambdas[static_cast<std::size_t>(j)];
    calib += lambda * ((p == 1 ? r : r * r) - 1.0);
  }
  return sharp / std::log1p(1.0 / noise_var) + calib - perturb;
}

FtplLearner::FtplLearner(optim::Box domain, int p, FtplConfig cfg,
                         std::pair<double, double> utility_range, Eigen::Index first_row)
    : domain_(std::move(domain)),
      p_(p),
      cfg_(cfg),
      utility_range_(utility_range),
      first_row_(first_row) {
  domain_.validate();
  if ((domain_.lower.array() <= 0.0).any()) {
    throw InvalidArgument("FTPL domain must be bounded away from zero");
  }
  if (p_ != 1 && p_ != 2) throw InvalidArgument("FTPL: p must be 1 or 2");
  cfg_.oracle.space = optim::SearchSpace::Log;
  current_ = domain_.geometric_center();
  perturbation_ = Eigen::VectorXd::Zero(domain_.dim());
}

Eigen::VectorXd FtplLearner::next(const Eigen::MatrixXd& X, const Eigen::VectorXd& y_std,
                                  Rng& rng) {
  if (X.rows() != first_row_ + rounds()) {
    throw InvalidArgument("FTPL: data has " + std::to_string(X.rows()) + " rows, expected " +
                          std::to_string(first_row_ + rounds()));
  }
  for (Eigen::Index i = 0; i < perturbation_.size(); ++i) {
    perturbation_(i) = cfg_.perturbation_std * rng.gaussian();
  }
  if (rounds() == 0) {
    current_ = domain_.geometric_center();
    last_value_ = last_warm_value_ = -perturbation_.dot(current_);
    return current_;
  }

  const auto objective = [&](const Eigen::VectorXd& theta) {
    try {
      return ftpl_objective(theta, X, y_std, lambdas_, betas_, cfg_.noise_var, p_, perturbation_,
                            cfg_.nu);
    } catch (const NumericalFailure&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  const Eigen::VectorXd warm = domain_.project(current_);
  last_warm_value_ = objective(warm);
  if (!std::isfinite(last_warm_value_)) {
    ++fallbacks_;
    return current_;
  }
  const optim::OptimizeResult r = optim::adam_minimize(objective, warm, domain_, cfg_.oracle);
  current_ = r.x;
  last_value_ = r.value;
  return current_;
}

void FtplLearner::observe(double lambda_played, double beta, double utility) {
  lambdas_.push_back(lambda_played);
  betas_.push_back(beta);
  utilities_.push_back(utility);
}

void FtplLearner::reset(std::pair<double, double> utility_range, Eigen::Index first_row) {
  utility_range_ = utility_range;
  first_row_ = first_row;
  lambdas_.clear();
  betas_.clear();
  utilities_.clear();
  current_ = domain_.geometric_center();
}

double omd_update(double lambda, double calibration, double step, double cap) {
  return std::min(lambda * std::exp(step * calibration), cap);
}

OmdDual::OmdDual(double cap, double lambda0, double step) : lambda_(0.0), cap_(cap), step_(step) {
  if (!(step_ > 0.0)) throw InvalidArgument("OMD step must be positive");
  reset(cap, lambda0);
}

void OmdDual::observe(double calibration) {
  lambda_ = omd_update(lambda_, calibration, step_, cap_);
}

void OmdDual::reset(double cap, double lambda0) {
  if (!(cap > 0.0) || !(lambda0 > 0.0)) {
    throw InvalidArgument("OMD: cap and initial multiplier must be positive");
  }
  cap_ = cap;
  lambda_ = std::min(lambda0, cap);
}

void recalibrate(FtplLearner& primal, OmdDual& dual, double sharpness, double calibration,
                 double beta) {
  const double lambda = dual.lambda();
  primal.observe(lambda, beta, sharpness + lambda * calibration);
  dual.observe(calibration);
}

std::string_view to_string(Phase phase) { return phase == Phase::Play ? "play" : "recovery"; }

double violation_update(double violation, double calibration) { return violation + calibration; }

PhaseController::PhaseController(double rho_hat, int horizon, double delta, ViolationBudget budget,
                                 bool literal)
    : rho_hat_(rho_hat), horizon_(horizon), eta_(delta / 3.0), literal_(literal) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  rho_tilde_ = online::rho_tilde(rho_hat, horizon);
  budget_ = m_rho(rho_tilde_, horizon, eta_, budget);
}

PhaseSignal PhaseController::check(int t) {
  if (t < 1 || t > horizon_) throw InvalidArgument("phase check: round outside [1, T]");
  if (switched_ && !literal_) return {Phase::Recovery, false};
  const double threshold =
      static_cast<double>(horizon_ - t) * rho_tilde_ + budget_ - 1.0;
  if (violation_ > threshold) {
    phase_ = Phase::Recovery;
    switched_ = true;
    return {Phase::Recovery, true};
  }
  return {phase_, false};
}

void PhaseController::add_violation(double calibration) {
  violation_ = violation_update(violation_, calibration);
  violation_plus_ += std::max(calibration, 0.0);
}

}  // namespace oscbo::online
