#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "oscbo/gp.hpp"
#include "oscbo/rng.hpp"
#include "oscbo/tabular.hpp"

namespace oscbo::tasks {

/// Negated Levy function, maximum 0 at (1, ..., 1).
double levy(const Eigen::VectorXd& x);

/// Hartmann on the unit cube in the maximization orientation
/// +Σ α_i exp(-Σ_j A_ij (x_j - P_ij)²). d must be 3 or 6.
double hartmann(const Eigen::VectorXd& x);

inline constexpr double kHartmann3Max = 3.86278214782076;
inline constexpr double kHartmann6Max = 3.3224081622136876;

enum class TaskKind { Synthetic, Tabular };

struct TaskSpec {
  std::string name;
  TaskKind kind = TaskKind::Synthetic;
  gp::Bounds bounds;
  std::function<double(const Eigen::VectorXd&)> evaluate;  // original units
  double optimum = 0.0;
  std::shared_ptr<const TabularOracle> oracle;  // tabular tasks only

  int dim() const { return bounds.dim(); }
};

/// Column roles and published ranges of a tabular task.
struct TabularTaskInfo {
  std::string name;
  TableSchema schema;
  std::vector<std::pair<double, double>> reference_bounds;
};

const std::vector<std::string>& task_names();
bool is_tabular(std::string_view name);
/// Throws ConfigError for names that are not tabular tasks.
const TabularTaskInfo& tabular_info(std::string_view name);

/// Builds a task by registry name. Tabular tasks need `data`; a custom schema
/// replaces the built-in column roles. Throws ConfigError on unknown names or
/// a missing data file.
TaskSpec make_task(std::string_view name, const std::optional<std::filesystem::path>& data = {},
                   const std::optional<TableSchema>& schema = {});

/// Wraps an already-built oracle as a task.
TaskSpec tabular_task(std::string name, std::shared_ptr<const TabularOracle> oracle);

/// Latin hypercube on [0,1]^d. Per dimension, a Fisher-Yates shuffle of the
/// strata (n - 1 uniforms, i = n-1 down to 1) followed by one jitter uniform
/// per point.
Eigen::MatrixXd latin_hypercube(Rng& rng, int n, int d);
Eigen::MatrixXd latin_hypercube(std::uint64_t seed, int n, int d);

}  // namespace oscbo::tasks
