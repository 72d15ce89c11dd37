#include <cmath>

#include "oscbo/error.hpp"
#include "oscbo/gp.hpp"

namespace oscbo::gp {

Bounds Bounds::unit(int dim) {
  return Bounds{Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
}

void Bounds::validate() const {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw InvalidArgument("Bounds: lower/upper must be non-empty and of equal length");
  }
  if (!(lower.array() < upper.array()).all()) {
    throw InvalidArgument("Bounds: every lower bound must be below its upper bound");
  }
}

Eigen::VectorXd Bounds::normalize(const Eigen::VectorXd& x) const {
  return (x - lower).cwiseQuotient(upper - lower);
}

Eigen::VectorXd Bounds::denormalize(const Eigen::VectorXd& u) const {
  return lower + u.cwiseProduct(upper - lower);
}

Eigen::MatrixXd Bounds::normalize_rows(const Eigen::MatrixXd& X) const {
  const Eigen::RowVectorXd lo = lower.transpose();
  const Eigen::RowVectorXd inv_span = (upper - lower).cwiseInverse().transpose();
  return (X.rowwise() - lo).array().rowwise() * inv_span.array();
}

Dataset fit_transforms(const Eigen::MatrixXd& raw_X, const Eigen::VectorXd& raw_y,
                       const Bounds& bounds, OutputTransform transform) {
  bounds.validate();
  if (raw_X.rows() != raw_y.size()) {
    throw InvalidArgument("fit_transforms: X and y have different lengths");
  }
  if (raw_X.rows() > 0 && raw_X.cols() != bounds.dim()) {
    throw InvalidArgument("fit_transforms: input dimension does not match bounds");
  }

  Dataset d;
  d.bounds = bounds;
  d.X = raw_X.rows() > 0 ? bounds.normalize_rows(raw_X) : Eigen::MatrixXd(0, bounds.dim());
  d.y_raw = raw_y;

  const Eigen::Index n = raw_y.size();
  if (transform == OutputTransform::Identity) {
    d.out_mean = 0.0;
    d.out_std = 1.0;
  } else if (n <= 1) {
    d.out_mean = n == 1 ? raw_y(0) : 0.0;
    d.out_std = 1.0;
    d.degenerate = true;
  } else {
    d.out_mean = raw_y.mean();
    const double ss = (raw_y.array() - d.out_mean).square().sum();
    d.out_std = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(d.out_std >= kMinOutputStd)) {
      d.out_std = kMinOutputStd;
      d.degenerate = true;
    }
  }
  d.y_std = (raw_y.array() - d.out_mean) / d.out_std;
  return d;
}

}  // namespace oscbo::gp
