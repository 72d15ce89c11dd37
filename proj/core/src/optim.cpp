#include "oscbo/optim.hpp"

#include <cmath>
#include <string>

#include "oscbo/error.hpp"

namespace oscbo::optim {

Box Box::uniform(int dim, double lo, double hi) {
  Box b{Eigen::VectorXd::Constant(dim, lo), Eigen::VectorXd::Constant(dim, hi)};
  b.validate();
  return b;
}

bool Box::contains(const Eigen::VectorXd& x) const {
  return x.size() == lower.size() && (x.array() >= lower.array()).all() &&
         (x.array() <= upper.array()).all();
}

Eigen::VectorXd Box::project(const Eigen::VectorXd& x) const {
  return x.cwiseMax(lower).cwiseMin(upper);
}

Eigen::VectorXd Box::geometric_center() const {
  return (lower.array() * upper.array()).sqrt().matrix();
}

void Box::validate() const {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw InvalidArgument("Box: lower/upper must be non-empty and of equal length");
  }
  if ((lower.array() > upper.array()).any()) {
    throw InvalidArgument("Box: lower bound exceeds upper bound");
  }
}

void OptimizerConfig::validate() const {
  if (!(lr > 0.0)) throw InvalidArgument("OptimizerConfig: lr must be positive");
  if (steps < 0) throw InvalidArgument("OptimizerConfig: steps must be non-negative");
  if (!(fd_step > 0.0)) throw InvalidArgument("OptimizerConfig: fd_step must be positive");
}

FdGradient finite_diff_grad(const Objective& objective, const Eigen::VectorXd& x, double h,
                            double fx) {
  FdGradient out{Eigen::VectorXd::Zero(x.size())};
  Eigen::VectorXd probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    probe(j) = x(j) + h;
    const double fp = objective(probe);
    probe(j) = x(j) - h;
    const double fm = objective(probe);
    probe(j) = x(j);

    const bool ok_p = std::isfinite(fp);
    const bool ok_m = std::isfinite(fm);
    if (ok_p && ok_m) {
      out.grad(j) = (fp - fm) / (2.0 * h);
      continue;
    }
    if (!std::isfinite(fx)) fx = objective(x);
    if (ok_p && std::isfinite(fx)) {
      out.grad(j) = (fp - fx) / h;
      ++out.one_sided;
    } else if (ok_m && std::isfinite(fx)) {
      out.grad(j) = (fx - fm) / h;
      ++out.one_sided;
    } else {
      ++out.zeroed;
    }
  }
  return out;
}

OptimizeResult adam_minimize(const Objective& objective, const Eigen::VectorXd& x0, const Box& box,
                             const OptimizerConfig& cfg, const Gradient& grad) {
  cfg.validate();
  box.validate();
  if (x0.size() != box.dim()) throw InvalidArgument("adam_minimize: x0 dimension mismatch");

  const bool log_space = cfg.space == SearchSpace::Log;
  if (log_space && (box.lower.array() <= 0.0).any()) {
    throw InvalidArgument("adam_minimize: log search space needs a strictly positive box");
  }
  // Everything below runs in search coordinates u; `to_x` maps back.
  const Box search = log_space ? Box{box.lower.array().log().matrix(), box.upper.array().log().matrix()}
                               : box;
  auto to_x = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return log_space ? box.project(u.array().exp().matrix()) : box.project(u);
  };

  OptimizeResult res;
  auto f_search = [&](const Eigen::VectorXd& u) {
    ++res.evaluations;
    return objective(to_x(u));
  };

  const Eigen::VectorXd x_init = box.project(x0);
  Eigen::VectorXd u = log_space ? Eigen::VectorXd(x_init.array().log()) : x_init;
  ++res.evaluations;
  double fu = objective(x_init);
  if (!std::isfinite(fu)) {
    throw InvalidArgument("adam_minimize: objective is not finite at the initial point");
  }
  Eigen::VectorXd best_x = x_init;
  double best_f = fu;

  Eigen::VectorXd m = Eigen::VectorXd::Zero(u.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(u.size());
  double b1t = 1.0, b2t = 1.0;
  for (int step = 0; step < cfg.steps; ++step) {
    const Eigen::VectorXd g =
        grad ? grad(u) : finite_diff_grad(f_search, u, cfg.fd_step, fu).grad;
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseAbs2();
    b1t *= cfg.beta1;
    b2t *= cfg.beta2;
    const Eigen::VectorXd m_hat = m / (1.0 - b1t);
    const Eigen::VectorXd v_hat = v / (1.0 - b2t);
    const Eigen::VectorXd next =
        search.project(u - cfg.lr * (m_hat.array() / (v_hat.array().sqrt() + cfg.eps)).matrix());

    const double f_next = f_search(next);
    if (!std::isfinite(f_next)) {
      ++res.skipped;
      continue;  // stay at the last finite iterate; moments keep evolving
    }
    u = next;
    fu = f_next;
    if (fu < best_f) {
      best_f = fu;
      best_x = to_x(u);
    }
  }

  res.x = best_x;
  res.value = best_f;
  return res;
}

}  // namespace oscbo::optim
