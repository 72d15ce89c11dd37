#include "oscbo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "oscbo/error.hpp"
#include "oscbo/normal.hpp"
#include "oscbo/optim.hpp"

namespace oscbo::acq {
namespace {

// For u >= 6: 1 - u·M(u) = r / (u + r) with r = 1/(u + 2/(u + 3/(u + ...))),
// M the Mills ratio. Evaluated bottom-up; all partial terms are positive.
double one_minus_u_mills(double u) {
  constexpr int kDepth = 200;
  double tail = u;
  for (int k = kDepth; k >= 2; --k) tail = u + k / tail;
  const double r = 1.0 / tail;
  return r / (u + r);
}

}  // namespace

AcquisitionKind parse_acquisition(std::string_view s) {
  if (s == "ucb") return AcquisitionKind::Ucb;
  if (s == "logei") return AcquisitionKind::LogEi;
  throw ConfigError("unknown acquisition '" + std::string(s) + "' (expected ucb|logei)");
}

std::string_view to_string(AcquisitionKind kind) {
  return kind == AcquisitionKind::Ucb ? "ucb" : "logei";
}

double ucb_value(double mean, double latent_var, double beta) {
  return mean + std::sqrt(beta) * std::sqrt(latent_var);
}

double logei_value(double mean, double latent_var, double best) {
  if (!(latent_var > 0.0)) {
    return mean > best ? std::log(mean - best) : -std::numeric_limits<double>::infinity();
  }
  const double sigma = std::sqrt(latent_var);
  const double z = (mean - best) / sigma;
  if (z >= -6.0) {
    return std::log(z * normal_cdf(z) + normal_pdf(z)) + std::log(sigma);
  }
  const double u = -z;
  return normal_logpdf(u) + std::log(one_minus_u_mills(u)) + std::log(sigma);
}

double acquisition_value(const gp::GpPosterior& post, const AcquisitionSpec& spec,
                         const Eigen::VectorXd& x) {
  const gp::Prediction p = post.predict(x);
  if (spec.kind == AcquisitionKind::Ucb) return ucb_value(p.mean, p.latent_var, spec.beta);
  return logei_value(p.mean, p.latent_var, spec.best_observed);
}

void MaximizerConfig::validate() const {
  if (restarts < 1 || raw_samples < restarts) {
    throw ConfigError("acquisition maximizer needs raw_samples >= restarts >= 1");
  }
  if (steps < 0 || !(lr > 0.0)) throw ConfigError("acquisition maximizer: bad steps/lr");
}

MaximizeResult maximize_on_unit_box(const std::function<double(const Eigen::VectorXd&)>& f, int d,
                                    Rng& rng, const MaximizerConfig& cfg) {
  cfg.validate();
  if (d < 1) throw InvalidArgument("maximize_on_unit_box: dimension must be >= 1");

  std::vector<Eigen::VectorXd> raw(static_cast<std::size_t>(cfg.raw_samples), Eigen::VectorXd(d));
  std::vector<double> vals(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    for (int j = 0; j < d; ++j) raw[i](j) = rng.uniform();
    vals[i] = f(raw[i]);
  }
  std::vector<std::size_t> order(raw.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // NaN sorts last.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double va = std::isnan(vals[a]) ? -std::numeric_limits<double>::infinity() : vals[a];
    const double vb = std::isnan(vals[b]) ? -std::numeric_limits<double>::infinity() : vals[b];
    return va > vb;
  });

  MaximizeResult best{raw[order[0]], vals[order[0]], vals[order[0]]};

  const optim::Box box = optim::Box::uniform(d, 0.0, 1.0);
  optim::OptimizerConfig oc;
  oc.lr = cfg.lr;
  oc.steps = cfg.steps;
  oc.fd_step = cfg.fd_step;
  const auto neg = [&](const Eigen::VectorXd& x) { return -f(x); };
  for (int r = 0; r < cfg.restarts; ++r) {
    const std::size_t idx = order[static_cast<std::size_t>(r)];
    if (!std::isfinite(vals[idx])) continue;
    const optim::OptimizeResult res = optim::adam_minimize(neg, raw[idx], box, oc);
    if (-res.value > best.value) {
      best.value = -res.value;
      best.x = res.x;
    }
  }
  return best;
}

MaximizeResult maximize_acquisition(const gp::GpPosterior& post, const AcquisitionSpec& spec,
                                    int d, Rng& rng, const MaximizerConfig& cfg) {
  return maximize_on_unit_box(
      [&](const Eigen::VectorXd& x) { return acquisition_value(post, spec, x); }, d, rng, cfg);
}

}  // namespace oscbo::acq
