#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "oscbo/error.hpp"
#include "oscbo/harness.hpp"

namespace oscbo::harness {

void RunConfig::validate() const {
  if (rounds < 1) throw ConfigError("rounds must be at least 1");
  if (n_init < 1) throw ConfigError("init must be at least 1");
  if (p != 1 && p != 2) throw ConfigError("p must be 1 or 2");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (!(rho_hat > 0.0 && rho_hat <= 1.0)) throw ConfigError("rho-hat must lie in (0, 1]");
  if (!(theta_lower > 0.0 && theta_lower < theta_upper)) {
    throw ConfigError("lengthscale box must satisfy 0 < lower < upper");
  }
  if (!(noise_std >= 0.0)) throw ConfigError("noise-std must be non-negative");
  if (!(noise_var > 0.0)) throw ConfigError("noise variance must be positive");
  if (!(budget.kappa >= 0.0)) throw ConfigError("kappa must be non-negative");
  if (beta.mode == losses::BetaSchedule::Mode::Fixed && !(beta.fixed_value > 0.0)) {
    throw ConfigError("beta must be positive");
  }
  if (method == baselines::Method::FixedKernel && !fixed_lengthscale) {
    throw ConfigError("gp-ucb-fixed needs a lengthscale");
  }
  maximizer.validate();
}

int RunConfig::exponent() const { return method == baselines::Method::OscboL1 ? 1 : p; }

namespace {

using Clock = std::chrono::steady_clock;

baselines::PolicyConfig policy_config(const RunConfig& cfg, int d) {
  baselines::PolicyConfig pc;
  pc.method = cfg.method;
  const int q = cfg.ard ? d : 1;
  pc.domain = optim::Box::uniform(q, cfg.theta_lower, cfg.theta_upper);
  pc.nu = cfg.nu;
  pc.noise_var = cfg.noise_var;
  pc.ftpl.nu = cfg.nu;
  pc.ftpl.noise_var = cfg.noise_var;
  pc.rho_hat = cfg.rho_hat;
  pc.delta = cfg.delta;
  pc.horizon = cfg.rounds;
  pc.budget = cfg.budget;
  pc.literal_recovery = cfg.literal_recovery;
  if (cfg.fixed_lengthscale) pc.fixed_lengthscale = Eigen::VectorXd::Constant(q, *cfg.fixed_lengthscale);
  return pc;
}

}  // namespace

RunResult run_single(const RunConfig& cfg) {
  cfg.validate();
  const tasks::TaskSpec task =
      cfg.task_spec ? *cfg.task_spec : tasks::make_task(cfg.task, cfg.data);
  const int d = task.dim();
  const int p = cfg.exponent();

  RunResult out;
  out.task = task.name;
  out.method = std::string(baselines::to_string(cfg.method));
  out.dim = d;
  out.optimum = task.optimum;

  Rng master(cfg.seed);
  Rng rng_init = master.split("init");
  Rng rng_acq = master.split("acq");
  Rng rng_ftpl = master.split("ftpl");
  Rng rng_noise = master.split("noise");

  auto observe = [&](const Eigen::VectorXd& x_orig) {
    const double f = task.evaluate(x_orig);
    const double y = cfg.noise_std > 0.0 ? f + cfg.noise_std * rng_noise.gaussian() : f;
    return std::pair{f, y};
  };

  Eigen::MatrixXd X_raw(cfg.n_init + cfg.rounds, d);
  Eigen::VectorXd y_raw(cfg.n_init + cfg.rounds);
  const Eigen::MatrixXd design = tasks::latin_hypercube(rng_init, cfg.n_init, d);
  for (int i = 0; i < cfg.n_init; ++i) {
    const Eigen::VectorXd x = task.bounds.denormalize(design.row(i).transpose());
    X_raw.row(i) = x.transpose();
    y_raw(i) = observe(x).second;
  }
  Eigen::Index n = cfg.n_init;

  auto dataset = [&] {
    return gp::fit_transforms(X_raw.topRows(n), y_raw.head(n), task.bounds, cfg.output);
  };

  const auto start = Clock::now();
  try {
    baselines::Policy policy(policy_config(cfg, d), dataset(), p);
    double best_y = -std::numeric_limits<double>::infinity();
    double best_f = -std::numeric_limits<double>::infinity();
    double cum = 0.0, V = 0.0, V_plus = 0.0;

    for (int t = 1; t <= cfg.rounds; ++t) {
      const gp::Dataset data = dataset();
      const double beta = cfg.beta.value(t);
      const baselines::RoundPlan plan = policy.plan(t, data, beta, rng_ftpl);

      const gp::KernelSpec spec{cfg.nu, plan.theta, 1.0};
      const gp::GpPosterior post = gp::GpPosterior::fit(data, spec, cfg.noise_var);

      acq::AcquisitionSpec aspec;
      aspec.kind = cfg.acquisition;
      aspec.beta = plan.ucb_multiplier * plan.ucb_multiplier;
      aspec.best_observed = data.y_std.maxCoeff();
      const acq::MaximizeResult best = acq::maximize_acquisition(post, aspec, d, rng_acq, cfg.maximizer);
      ++out.acquisitions;

      const gp::Prediction pred = post.predict(best.x);
      const Eigen::VectorXd x_orig = task.bounds.denormalize(best.x);
      const auto [f, y] = observe(x_orig);
      const double y_s = data.standardize(y);
      const losses::RoundFeedback fb = losses::round_feedback(y_s, pred, cfg.noise_var, beta, p);
      policy.observe(fb);

      V += fb.calibration;
      V_plus += std::max(fb.calibration, 0.0);
      best_y = std::max(best_y, y);
      best_f = std::max(best_f, f);
      const double gap = std::max(task.optimum - f, 0.0);
      cum += gap;

      RoundRecord r;
      r.t = t;
      r.x.assign(x_orig.data(), x_orig.data() + d);
      r.y = y;
      r.theta.assign(plan.theta.data(), plan.theta.data() + plan.theta.size());
      if (policy.is_oscbo()) {
        r.lambda = plan.lambda;
        r.phase = std::string(online::to_string(plan.phase));
      }
      r.L_s = fb.sharpness;
      r.L_c = fb.calibration;
      r.V = V;
      r.V_plus = V_plus;
      r.covered = fb.covered;
      r.ci_width = fb.ci_width;
      r.beta = beta;
      r.best_y = best_y;
      r.simple_regret = std::max(task.optimum - best_f, 0.0);
      r.cum_regret = cum;
      if (cfg.wall_clock) {
        r.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
      }
      r.f_value = f;
      r.latent_var = pred.latent_var;
      r.y_std = y_s;
      r.pred_mean = pred.mean;
      out.records.push_back(std::move(r));

      X_raw.row(n) = x_orig.transpose();
      y_raw(n) = y;
      ++n;
    }
    out.mll_refits = policy.mll_refits();
  } catch (const NumericalFailure& e) {
    out.error = std::string("round ") + std::to_string(out.records.size() + 1) + ": " + e.what();
  }
  return out;
}

}  // namespace oscbo::harness
