#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "oscbo/gp.hpp"

namespace oscbo::tasks {

enum class OracleMode { Multilinear, Knn };

std::string_view to_string(OracleMode mode);

/// Continuous oracle over an experimental table.
///
/// Designs that repeat exactly are merged and their values averaged; stored
/// designs keep the order of their first occurrence, which is also the
/// tie-break order at the k-th neighbor distance. When the merged designs are
/// the full product of their per-dimension levels the oracle interpolates
/// multilinearly, otherwise it uses k-nearest-neighbor inverse-distance
/// weighting in the normalized cube.
class TabularOracle {
 public:
  /// `table` is m x (d+1): d input columns then the objective. Requires
  /// m >= k and no NaN. Throws InvalidArgument otherwise, or when an input
  /// column is constant.
  explicit TabularOracle(const Eigen::MatrixXd& table, int k = 12, double power = 2.0,
                         double epsilon = 1e-12);

  /// Clips to the bounds first. Stored designs return their averaged value.
  double operator()(const Eigen::VectorXd& x) const;

  int dim() const { return static_cast<int>(designs_.cols()); }
  OracleMode mode() const { return mode_; }
  const gp::Bounds& bounds() const { return bounds_; }
  const Eigen::MatrixXd& designs() const { return designs_; }
  const Eigen::MatrixXd& points_norm() const { return points_norm_; }
  const Eigen::VectorXd& values() const { return values_; }
  double optimum() const { return values_.maxCoeff(); }
  int k() const { return k_; }
  double power() const { return power_; }
  double epsilon() const { return epsilon_; }

  /// kNN estimate at a normalized point, regardless of mode.
  double knn(const Eigen::VectorXd& x_norm) const;
  /// Multilinear estimate at a clipped original-unit point; grid mode only.
  double multilinear(const Eigen::VectorXd& x) const;

 private:
  std::ptrdiff_t find_stored(const Eigen::VectorXd& x) const;

  int k_;
  double power_;
  double epsilon_;
  gp::Bounds bounds_;
  Eigen::MatrixXd designs_;
  Eigen::MatrixXd points_norm_;
  Eigen::VectorXd values_;
  OracleMode mode_ = OracleMode::Knn;
  std::vector<std::vector<double>> levels_;  // grid mode
  std::vector<double> grid_values_;         // row-major over levels_
  std::vector<std::size_t> order_;          // designs sorted lexicographically
};

/// Which CSV columns feed the oracle (0-based, header row excluded).
struct TableSchema {
  std::vector<int> input_columns;
  int objective_column = -1;
};

/// Reads a CSV with a header row into an m x (d+1) matrix ordered as
/// inputs then objective. Throws IngestionError naming the data row on wrong
/// arity or a non-numeric cell, ConfigError if the file cannot be opened.
Eigen::MatrixXd read_table(const std::filesystem::path& path, const TableSchema& schema);

}  // namespace oscbo::tasks
