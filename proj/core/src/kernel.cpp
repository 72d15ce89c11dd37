#include <cmath>
#include <string>

#include "oscbo/error.hpp"
#include "oscbo/gp.hpp"

namespace oscbo::gp {
namespace {

const double kSqrt3 = std::sqrt(3.0);
const double kSqrt5 = std::sqrt(5.0);

// Rows of X divided by the lengthscale, so that r = ‖a' - b'‖.
Eigen::MatrixXd scaled_rows(const KernelSpec& spec, const Eigen::MatrixXd& X) {
  if (spec.lengthscale.size() == 1) return X / spec.lengthscale(0);
  return X * spec.lengthscale.cwiseInverse().asDiagonal();
}

Eigen::VectorXd scaled_point(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (spec.lengthscale.size() == 1) return x / spec.lengthscale(0);
  return x.cwiseQuotient(spec.lengthscale);
}

}  // namespace

Smoothness parse_smoothness(std::string_view s) {
  if (s == "0.5" || s == "1/2") return Smoothness::Half;
  if (s == "1.5" || s == "3/2") return Smoothness::ThreeHalves;
  if (s == "2.5" || s == "5/2") return Smoothness::FiveHalves;
  throw InvalidKernel("unsupported Matérn smoothness '" + std::string(s) + "'");
}

std::string_view to_string(Smoothness nu) {
  switch (nu) {
    case Smoothness::Half: return "0.5";
    case Smoothness::ThreeHalves: return "1.5";
    case Smoothness::FiveHalves: return "2.5";
  }
  return "?";
}

KernelSpec KernelSpec::isotropic(double theta, Smoothness nu) {
  KernelSpec k{nu, Eigen::VectorXd::Constant(1, theta), 1.0};
  k.validate();
  return k;
}

KernelSpec KernelSpec::with_lengthscale(const Eigen::VectorXd& theta, Smoothness nu) {
  KernelSpec k{nu, theta, 1.0};
  k.validate();
  return k;
}

void KernelSpec::validate(Eigen::Index dim) const {
  if (lengthscale.size() == 0) throw InvalidKernel("empty lengthscale");
  if (!(lengthscale.array() > 0.0).all() || !lengthscale.allFinite()) {
    throw InvalidKernel("lengthscale components must be positive and finite");
  }
  if (!(output_scale > 0.0)) throw InvalidKernel("output scale must be positive");
  if (dim >= 0 && lengthscale.size() != 1 && lengthscale.size() != dim) {
    throw InvalidKernel("lengthscale length " + std::to_string(lengthscale.size()) +
                        " does not match input dimension " + std::to_string(dim));
  }
}

double matern_profile(Smoothness nu, double r) {
  switch (nu) {
    case Smoothness::Half:
      return std::exp(-r);
    case Smoothness::ThreeHalves: {
      const double s = kSqrt3 * r;
      return (1.0 + s) * std::exp(-s);
    }
    case Smoothness::FiveHalves: {
      const double s = kSqrt5 * r;
      return (1.0 + s + 5.0 * r * r / 3.0) * std::exp(-s);
    }
  }
  return 0.0;
}

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& a,
                   const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size()) throw InvalidKernel("kernel_eval: point dimensions differ");
  spec.validate(a.size());
  const double r = (scaled_point(spec, a) - scaled_point(spec, b)).norm();
  return spec.output_scale * matern_profile(spec.nu, r);
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Eigen::MatrixXd& X) {
  spec.validate(X.cols());
  const Eigen::Index n = X.rows();
  const Eigen::MatrixXd S = scaled_rows(spec, X);
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    K(j, j) = spec.output_scale;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double r = (S.row(i) - S.row(j)).norm();
      const double k = spec.output_scale * matern_profile(spec.nu, r);
      K(i, j) = k;
      K(j, i) = k;
    }
  }
  return K;
}

Eigen::VectorXd kernel_vector(const KernelSpec& spec, const Eigen::MatrixXd& X,
                              const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (X.rows() > 0 && X.cols() != x.size()) {
    throw InvalidKernel("kernel_vector: point dimension does not match data");
  }
  spec.validate(x.size());
  const Eigen::MatrixXd S = scaled_rows(spec, X);
  const Eigen::VectorXd s = scaled_point(spec, x);
  Eigen::VectorXd k(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    k(i) = spec.output_scale * matern_profile(spec.nu, (S.row(i).transpose() - s).norm());
  }
  return k;
}

}  // namespace oscbo::gp
