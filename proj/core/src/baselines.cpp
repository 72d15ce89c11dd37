#include "oscbo/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "oscbo/error.hpp"
#include "oscbo/normal.hpp"

namespace oscbo::baselines {

Method parse_method(std::string_view s) {
  if (s == "oscbo") return Method::Oscbo;
  if (s == "oscbo-l1") return Method::OscboL1;
  if (s == "gp-ucb-mll") return Method::GpUcbMll;
  if (s == "ocbo") return Method::Ocbo;
  if (s == "a-gp-ucb") return Method::AGpUcb;
  if (s == "gp-ucb-fixed") return Method::FixedKernel;
  throw ConfigError("unknown method '" + std::string(s) +
                    "' (expected oscbo|oscbo-l1|gp-ucb-mll|ocbo|a-gp-ucb|gp-ucb-fixed)");
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Oscbo: return "oscbo";
    case Method::OscboL1: return "oscbo-l1";
    case Method::GpUcbMll: return "gp-ucb-mll";
    case Method::Ocbo: return "ocbo";
    case Method::AGpUcb: return "a-gp-ucb";
    case Method::FixedKernel: return "gp-ucb-fixed";
  }
  return "?";
}

double agp_ucb_lengthscale(double theta0, int t, int t0, double theta_min) {
  if (!(theta0 > 0.0) || !(theta_min > 0.0)) {
    throw InvalidArgument("agp_ucb_lengthscale: theta0 and theta_min must be positive");
  }
  const double g = t <= t0 ? 1.0 : std::sqrt(static_cast<double>(t));
  return std::max(theta0 / g, theta_min);
}

std::vector<LooPrediction> loo_predictive(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                          const gp::KernelSpec& spec, double noise_var) {
  const Eigen::Index n = X.rows();
  if (n < 2) throw InvalidArgument("loo_predictive: need at least two observations");
  if (y.size() != n) throw InvalidArgument("loo_predictive: X and y lengths differ");

  const gp::CholeskyFactor f = gp::factorize_with_jitter(gp::kernel_matrix(spec, X), noise_var);
  // K_y⁻¹ = L⁻ᵀL⁻¹; its diagonal is the column norms of L⁻¹.
  const Eigen::MatrixXd Linv =
      f.L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::VectorXd diag = Linv.colwise().squaredNorm().transpose();
  const Eigen::VectorXd alpha = Linv.transpose() * (Linv * y);

  std::vector<LooPrediction> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = {y(i) - alpha(i) / diag(i), 1.0 / diag(i)};
  }
  return out;
}

double nearest_rank_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidArgument("quantile of an empty sample");
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("quantile level must lie in (0, 1]");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  // The small slack keeps p·n that is an integer up to rounding on that integer.
  auto rank = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

OcboLevel ocbo_recalibrate(std::span<const LooPrediction> loo, const Eigen::VectorXd& y,
                           double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("ocbo: delta must lie in (0, 1)");
  constexpr double kLo = 0.5 + 1e-6;
  constexpr double kHi = 1.0 - 1e-6;
  if (static_cast<int>(loo.size()) < kOcboMinCalibration) {
    const double q = 1.0 - delta;
    return {q, normal_quantile(q), false};
  }
  if (static_cast<Eigen::Index>(loo.size()) != y.size()) {
    throw InvalidArgument("ocbo: LOO predictions and observations differ in length");
  }
  std::vector<double> pit(loo.size());
  for (std::size_t i = 0; i < loo.size(); ++i) {
    pit[i] = normal_cdf((y(static_cast<Eigen::Index>(i)) - loo[i].mean) / std::sqrt(loo[i].var));
  }
  const double q = std::clamp(nearest_rank_quantile(std::move(pit), 1.0 - delta), kLo, kHi);
  return {q, normal_quantile(q), true};
}

namespace {

Eigen::VectorXd clamp_into(const optim::Box& box, Eigen::VectorXd theta) {
  return box.project(theta);
}

}  // namespace

Policy::Policy(PolicyConfig cfg, const gp::Dataset& initial, int p)
    : cfg_(std::move(cfg)), p_(p), state_(FixedState{}) {
  cfg_.domain.validate();
  if (p_ != 1 && p_ != 2) throw ConfigError("calibration exponent p must be 1 or 2");
  const Eigen::VectorXd start = cfg_.domain.geometric_center();

  switch (cfg_.method) {
    case Method::Oscbo:
    case Method::OscboL1: {
      online::FtplConfig fc = cfg_.ftpl;
      fc.nu = cfg_.nu;
      fc.noise_var = cfg_.noise_var;
      online::PhaseController ctrl(cfg_.rho_hat, cfg_.horizon, cfg_.delta, cfg_.budget,
                                   cfg_.literal_recovery);
      const double inv = 1.0 / ctrl.rho_tilde();
      online::FtplLearner primal(cfg_.domain, p_, fc, {-inv, 1.0 + inv}, initial.size());
      online::OmdDual dual(inv, 1.0, cfg_.omd_step);
      state_ = OscboState{std::move(primal), dual, ctrl};
      break;
    }
    case Method::GpUcbMll:
    case Method::Ocbo:
      state_ = RefitState{start, std::nullopt};
      break;
    case Method::AGpUcb: {
      const Eigen::VectorXd theta0 = refit_mll(initial, start);
      state_ = ScheduleState{theta0, cfg_.agp_t0, cfg_.agp_theta_min, theta0};
      break;
    }
    case Method::FixedKernel:
      if (!cfg_.fixed_lengthscale) throw ConfigError("gp-ucb-fixed needs a fixed lengthscale");
      gp::KernelSpec{cfg_.nu, *cfg_.fixed_lengthscale, 1.0}.validate();
      state_ = FixedState{*cfg_.fixed_lengthscale};
      break;
  }
}

Eigen::VectorXd Policy::refit_mll(const gp::Dataset& data, const Eigen::VectorXd& init) {
  ++mll_refits_;
  return gp::mll_refit(data, cfg_.domain, init, cfg_.mll, cfg_.nu, cfg_.noise_var).lengthscale;
}

RoundPlan Policy::plan(int t, const gp::Dataset& data, double beta, Rng& rng) {
  RoundPlan plan;
  plan.ucb_multiplier = std::sqrt(beta);

  if (auto* s = std::get_if<OscboState>(&state_)) {
    const online::PhaseSignal sig = s->controller.check(t);
    if (sig.reinitialize) {
      s->primal.reset({-1.0, 1.0}, data.size());
      s->dual.reset(1.0, 1.0);
    }
    plan.phase = sig.phase;
    plan.reinitialized = sig.reinitialize;
    plan.theta = s->primal.next(data.X, data.y_std, rng);
    plan.lambda = s->dual.lambda();
  } else if (auto* s = std::get_if<RefitState>(&state_)) {
    s->theta = refit_mll(data, s->theta);
    plan.theta = s->theta;
    if (cfg_.method == Method::Ocbo) {
      const gp::KernelSpec spec{cfg_.nu, s->theta, 1.0};
      std::vector<LooPrediction> loo;
      if (data.size() >= kOcboMinCalibration) {
        loo = loo_predictive(data.X, data.y_std, spec, cfg_.noise_var);
      }
      s->level = ocbo_recalibrate(loo, data.y_std, cfg_.delta);
      plan.ucb_multiplier = s->level->multiplier;
    }
  } else if (auto* s = std::get_if<ScheduleState>(&state_)) {
    Eigen::VectorXd theta(s->theta0.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      theta(i) = agp_ucb_lengthscale(s->theta0(i), t, s->t0, s->theta_min);
    }
    s->theta = clamp_into(cfg_.domain, std::move(theta));
    plan.theta = s->theta;
  } else {
    plan.theta = std::get<FixedState>(state_).theta;
  }
  return plan;
}

void Policy::observe(const losses::RoundFeedback& fb) {
  if (auto* s = std::get_if<OscboState>(&state_)) {
    online::recalibrate(s->primal, s->dual, fb.sharpness, fb.calibration, fb.beta);
    s->controller.add_violation(fb.calibration);
  }
}

Eigen::VectorXd policy_next_theta(Policy& policy, const gp::Dataset& data, int t, double beta,
                                  Rng& rng) {
  return policy.plan(t, data, beta, rng).theta;
}

}  // namespace oscbo::baselines
