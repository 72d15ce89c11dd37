#pragma once

#include <functional>
#include <limits>

#include <Eigen/Core>

namespace oscbo::optim {

/// Axis-aligned box. Bounds are inclusive.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static Box uniform(int dim, double lo, double hi);

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Eigen::VectorXd& x) const;
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
  /// Componentwise sqrt(lower * upper); requires lower > 0.
  Eigen::VectorXd geometric_center() const;
  void validate() const;
};

enum class SearchSpace { Linear, Log };

struct OptimizerConfig {
  double lr = 0.01;
  int steps = 50;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  SearchSpace space = SearchSpace::Linear;
  double fd_step = 1e-5;

  void validate() const;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;
/// Gradient in search-space coordinates (log coordinates when space == Log).
using Gradient = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct OptimizeResult {
  Eigen::VectorXd x;   // in the caller's (linear) coordinates
  double value = 0.0;  // objective at x
  int evaluations = 0;
  int skipped = 0;     // iterates with non-finite objective
};

/// Projected Adam with bias correction. Returns the best iterate visited, never
/// the last one, so the result is never worse than x0. Throws InvalidArgument
/// when the objective is non-finite at x0.
OptimizeResult adam_minimize(const Objective& objective, const Eigen::VectorXd& x0, const Box& box,
                             const OptimizerConfig& cfg, const Gradient& grad = {});

struct FdGradient {
  Eigen::VectorXd grad;
  int one_sided = 0;  // coordinates that fell back to a one-sided difference
  int zeroed = 0;     // coordinates where both probes were non-finite
};

/// Central differences (f(x+h e_j) - f(x-h e_j)) / 2h per coordinate.
/// `fx` is f(x) if the caller already has it; it is only used for the
/// one-sided fallback.
FdGradient finite_diff_grad(const Objective& objective, const Eigen::VectorXd& x, double h = 1e-5,
                            double fx = std::numeric_limits<double>::quiet_NaN());

}  // namespace oscbo::optim
