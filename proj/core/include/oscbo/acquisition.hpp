#pragma once

#include <functional>
#include <string_view>

#include <Eigen/Core>

#include "oscbo/gp.hpp"
#include "oscbo/rng.hpp"

namespace oscbo::acq {

enum class AcquisitionKind { Ucb, LogEi };

AcquisitionKind parse_acquisition(std::string_view s);  // "ucb" | "logei"
std::string_view to_string(AcquisitionKind kind);

/// mean + √β·√latent_var.
double ucb_value(double mean, double latent_var, double beta);

/// log E[max(f - best, 0)] under N(mean, latent_var), evaluated in the log
/// domain. For z = (mean - best)/σ below -6 the ratio zΦ(z)/φ(z) + 1 is taken
/// from the continued fraction of the Mills ratio, which stays accurate where
/// the direct form cancels. latent_var = 0 gives log(mean - best) or -inf.
double logei_value(double mean, double latent_var, double best);

/// `beta` is the already-evaluated exploration scale β_t for UCB (the
/// multiplier on σ is √β). `best_observed` is the incumbent in standardized
/// units for LogEI.
struct AcquisitionSpec {
  AcquisitionKind kind = AcquisitionKind::Ucb;
  double beta = 2.0;
  double best_observed = 0.0;
};

double acquisition_value(const gp::GpPosterior& post, const AcquisitionSpec& spec,
                         const Eigen::VectorXd& x);

struct MaximizerConfig {
  int raw_samples = 20;
  int restarts = 5;
  int steps = 50;
  double lr = 0.05;
  double fd_step = 1e-5;

  void validate() const;
};

struct MaximizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double best_raw_value = 0.0;
};

/// Multi-start maximizer over [0,1]^d: `raw_samples` uniform draws (d words
/// each, row-major), the top `restarts` by value (ties to the lower sample
/// index) refined by projected Adam ascent with finite-difference gradients.
/// Returns the best point seen, raw or refined.
MaximizeResult maximize_on_unit_box(const std::function<double(const Eigen::VectorXd&)>& f, int d,
                                    Rng& rng, const MaximizerConfig& cfg = {});

MaximizeResult maximize_acquisition(const gp::GpPosterior& post, const AcquisitionSpec& spec,
                                    int d, Rng& rng, const MaximizerConfig& cfg = {});

}  // namespace oscbo::acq
