#pragma once

#include <string_view>

#include <Eigen/Core>

#include "oscbo/optim.hpp"

namespace oscbo::gp {

/// Half-integer Matérn smoothness. Only the closed forms are supported.
enum class Smoothness { Half, ThreeHalves, FiveHalves };

Smoothness parse_smoothness(std::string_view s);  // "0.5" | "1.5" | "2.5"
std::string_view to_string(Smoothness nu);

/// Matérn covariance with fixed output scale.
///
/// `lengthscale` has length 1 (isotropic, broadcast over every input
/// dimension) or d (ARD). Inputs live in the unit cube.
struct KernelSpec {
  Smoothness nu = Smoothness::FiveHalves;
  Eigen::VectorXd lengthscale = Eigen::VectorXd::Ones(1);
  double output_scale = 1.0;

  static KernelSpec isotropic(double theta, Smoothness nu = Smoothness::FiveHalves);
  static KernelSpec with_lengthscale(const Eigen::VectorXd& theta,
                                     Smoothness nu = Smoothness::FiveHalves);

  /// Throws InvalidKernel on non-positive lengthscale or output scale, or a
  /// lengthscale length that is neither 1 nor `dim` (pass dim < 0 to skip).
  void validate(Eigen::Index dim = -1) const;
};

/// m_ν(r) for the scaled distance r.
double matern_profile(Smoothness nu, double r);

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& a,
                   const Eigen::Ref<const Eigen::VectorXd>& b);
/// Symmetric n×n Gram matrix over the rows of X.
Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Eigen::MatrixXd& X);
/// k(X_i, x) for every row i.
Eigen::VectorXd kernel_vector(const KernelSpec& spec, const Eigen::MatrixXd& X,
                              const Eigen::Ref<const Eigen::VectorXd>& x);

/// Per-dimension original-unit bounds for the unit-cube map.
struct Bounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static Bounds unit(int dim);
  int dim() const { return static_cast<int>(lower.size()); }
  void validate() const;
  Eigen::VectorXd normalize(const Eigen::VectorXd& x) const;
  Eigen::VectorXd denormalize(const Eigen::VectorXd& u) const;
  Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& X) const;
};

enum class OutputTransform { Standardize, Identity };

/// Observations with input normalization and output standardization applied.
/// X rows lie in the unit cube; y_std = (y_raw - out_mean) / out_std.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y_raw;
  Eigen::VectorXd y_std;
  double out_mean = 0.0;
  double out_std = 1.0;
  bool degenerate = false;  // standardization fell back (n <= 1 or zero spread)
  Bounds bounds;

  Eigen::Index size() const { return X.rows(); }
  Eigen::Index dim() const { return X.cols(); }
  double standardize(double y) const { return (y - out_mean) / out_std; }
  double destandardize(double z) const { return z * out_std + out_mean; }
};

inline constexpr double kMinOutputStd = 1e-8;

/// Normalizes inputs against `bounds` and refits the output standardization
/// (sample mean, n-1 sample std) from scratch. With n <= 1 the std is 1; with
/// zero spread it is floored at kMinOutputStd. Either case sets `degenerate`.
Dataset fit_transforms(const Eigen::MatrixXd& raw_X, const Eigen::VectorXd& raw_y,
                       const Bounds& bounds,
                       OutputTransform transform = OutputTransform::Standardize);

struct Prediction {
  double mean = 0.0;
  double latent_var = 0.0;
};

/// Lower Cholesky factor of K + noise·I, with the extra diagonal jitter that
/// was needed (0 if none).
struct CholeskyFactor {
  Eigen::MatrixXd L;
  double jitter = 0.0;
};

/// Tries K + noise·I, then adds 1e-10, 1e-8, 1e-6 to the diagonal. Throws
/// NumericalFailure listing every level attempted.
CholeskyFactor factorize_with_jitter(Eigen::MatrixXd K, double noise_var);

/// Exact GP posterior with zero prior mean in standardized output space.
class GpPosterior {
 public:
  /// Empty posterior (prior) for inputs of dimension `dim`.
  GpPosterior(KernelSpec kernel, double noise_var, Eigen::Index dim);

  static GpPosterior fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const KernelSpec& kernel, double noise_var);
  static GpPosterior fit(const Dataset& data, const KernelSpec& kernel, double noise_var) {
    return fit(data.X, data.y_std, kernel, noise_var);
  }

  /// Mean k(x)ᵀw and latent variance k(x,x) - ‖L⁻¹k(x)‖², clamped to
  /// [0, output_scale].
  Prediction predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// -½[yᵀ(K+σ²I)⁻¹y + log det(K+σ²I) + n log 2π].
  double log_marginal_likelihood() const;
  /// Σ log L_ii² (= log det(K+σ²I)).
  double log_det() const;

  const KernelSpec& kernel() const { return kernel_; }
  double noise_var() const { return noise_var_; }
  const Eigen::MatrixXd& chol() const { return L_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  /// L⁻¹y, the whitened residuals.
  const Eigen::VectorXd& whitened() const { return whitened_; }
  const Eigen::MatrixXd& inputs() const { return X_; }
  const Eigen::VectorXd& targets() const { return y_; }
  double jitter() const { return jitter_; }
  Eigen::Index size() const { return X_.rows(); }
  Eigen::Index dim() const { return X_.cols(); }

 private:
  KernelSpec kernel_;
  double noise_var_;
  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
  Eigen::MatrixXd L_;
  Eigen::VectorXd whitened_;
  Eigen::VectorXd weights_;
  double jitter_ = 0.0;
};

double log_marginal_likelihood(const Dataset& data, const KernelSpec& kernel, double noise_var);

struct MllRefitResult {
  Eigen::VectorXd lengthscale;
  double mll = 0.0;
  int skipped = 0;  // iterates whose GP fit failed
};

/// Adam ascent on the log marginal likelihood over log-lengthscales, projected
/// into `domain`, returning the best iterate. Gradients are central finite
/// differences in log space (cfg.fd_step).
MllRefitResult mll_refit(const Dataset& data, const optim::Box& domain,
                         const Eigen::VectorXd& init, const optim::OptimizerConfig& cfg,
                         Smoothness nu = Smoothness::FiveHalves, double noise_var = 0.01);

/// Finite-difference gradient of the MLL w.r.t. log-lengthscale, exactly as
/// mll_refit computes it.
Eigen::VectorXd mll_log_gradient(const Dataset& data, const Eigen::VectorXd& lengthscale,
                                 Smoothness nu, double noise_var, double h = 1e-5);

}  // namespace oscbo::gp
