#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <vector>
#include <limits>
#include <numbers>

#include "oscbo/error.hpp"
#include "oscbo/gp.hpp"

namespace oscbo::gp {

CholeskyFactor factorize_with_jitter(Eigen::MatrixXd K, double noise_var) {
  if (!(noise_var > 0.0)) throw InvalidArgument("noise variance must be positive");
  static constexpr double kJitter[] = {0.0, 1e-10, 1e-8, 1e-6};
  K.diagonal().array() += noise_var;
  std::vector<double> attempted;
  double applied = 0.0;
  for (double jitter : kJitter) {
    K.diagonal().array() += jitter - applied;
    applied = jitter;
    attempted.push_back(jitter);
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXd L = llt.matrixL();
      if (L.allFinite()) return {std::move(L), jitter};
    }
  }
  throw NumericalFailure("Cholesky factorization failed after jitter escalation", attempted);
}

GpPosterior::GpPosterior(KernelSpec kernel, double noise_var, Eigen::Index dim)
    : kernel_(std::move(kernel)),
      noise_var_(noise_var),
      X_(0, dim),
      y_(0),
      L_(0, 0),
      whitened_(0),
      weights_(0) {
  kernel_.validate(dim);
  if (!(noise_var_ > 0.0)) throw InvalidArgument("noise variance must be positive");
}

GpPosterior GpPosterior::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const KernelSpec& kernel, double noise_var) {
  if (X.rows() != y.size()) throw InvalidArgument("gp_fit: X and y have different lengths");
  GpPosterior post(kernel, noise_var, X.cols());
  if (X.rows() == 0) return post;

  CholeskyFactor f = factorize_with_jitter(kernel_matrix(kernel, X), noise_var);
  post.X_ = X;
  post.y_ = y;
  post.L_ = std::move(f.L);
  post.jitter_ = f.jitter;
  post.whitened_ = post.L_.triangularView<Eigen::Lower>().solve(y);
  post.weights_ = post.L_.transpose().triangularView<Eigen::Upper>().solve(post.whitened_);
  return post;
}

Prediction GpPosterior::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const double prior = kernel_.output_scale;
  if (X_.rows() == 0) return {0.0, prior};
  const Eigen::VectorXd k = kernel_vector(kernel_, X_, x);
  const Eigen::VectorXd v = L_.triangularView<Eigen::Lower>().solve(k);
  const double var = prior - v.squaredNorm();
  return {k.dot(weights_), std::clamp(var, 0.0, prior)};
}

double GpPosterior::log_det() const { return 2.0 * L_.diagonal().array().log().sum(); }

double GpPosterior::log_marginal_likelihood() const {
  const double n = static_cast<double>(X_.rows());
  return -0.5 * (whitened_.squaredNorm() + log_det() + n * std::log(2.0 * std::numbers::pi));
}

double log_marginal_likelihood(const Dataset& data, const KernelSpec& kernel, double noise_var) {
  return GpPosterior::fit(data, kernel, noise_var).log_marginal_likelihood();
}

namespace {

double mll_or_nan(const Dataset& data, const Eigen::VectorXd& theta, Smoothness nu,
                  double noise_var) {
  try {
    return log_marginal_likelihood(data, KernelSpec{nu, theta, 1.0}, noise_var);
  } catch (const NumericalFailure&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

MllRefitResult mll_refit(const Dataset& data, const optim::Box& domain,
                         const Eigen::VectorXd& init, const optim::OptimizerConfig& cfg,
                         Smoothness nu, double noise_var) {
  domain.validate();
  if ((domain.lower.array() <= 0.0).any()) {
    throw InvalidArgument("mll_refit: lengthscale domain must be bounded away from zero");
  }
  optim::OptimizerConfig log_cfg = cfg;
  log_cfg.space = optim::SearchSpace::Log;

  const auto neg_mll = [&](const Eigen::VectorXd& theta) {
    return -mll_or_nan(data, theta, nu, noise_var);
  };
  const optim::OptimizeResult r =
      optim::adam_minimize(neg_mll, domain.project(init), domain, log_cfg);
  return {r.x, -r.value, r.skipped};
}

Eigen::VectorXd mll_log_gradient(const Dataset& data, const Eigen::VectorXd& lengthscale,
                                 Smoothness nu, double noise_var, double h) {
  const auto f = [&](const Eigen::VectorXd& u) {
    return mll_or_nan(data, Eigen::VectorXd(u.array().exp()), nu, noise_var);
  };
  return optim::finite_diff_grad(f, Eigen::VectorXd(lengthscale.array().log()), h).grad;
}

}  // namespace oscbo::gp
