#include "oscbo/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "oscbo/error.hpp"

namespace oscbo::tasks {

double levy(const Eigen::VectorXd& x) {
  const Eigen::Index d = x.size();
  if (d < 1) throw InvalidArgument("levy: empty input");
  constexpr double pi = std::numbers::pi;
  auto w = [&](Eigen::Index i) { return 1.0 + (x(i) - 1.0) / 4.0; };
  auto sq = [](double v) { return v * v; };

  double s = sq(std::sin(pi * w(0)));
  for (Eigen::Index i = 0; i + 1 < d; ++i) {
    const double wi = w(i);
    s += sq(wi - 1.0) * (1.0 + 10.0 * sq(std::sin(pi * wi + 1.0)));
  }
  const double wd = w(d - 1);
  s += sq(wd - 1.0) * (1.0 + sq(std::sin(2.0 * pi * wd)));
  return -s;
}

namespace {

constexpr double kAlpha[4] = {1.0, 1.2, 3.0, 3.2};

constexpr double kA3[4][3] = {{3, 10, 30}, {0.1, 10, 35}, {3, 10, 30}, {0.1, 10, 35}};
constexpr double kP3[4][3] = {{0.3689, 0.1170, 0.2673},
                              {0.4699, 0.4387, 0.7470},
                              {0.1091, 0.8732, 0.5547},
                              {0.03815, 0.5743, 0.8828}};

constexpr double kA6[4][6] = {{10, 3, 17, 3.5, 1.7, 8},
                              {0.05, 10, 17, 0.1, 8, 14},
                              {3, 3, 1.7, 10, 17, 8},
                              {17, 8, 0.05, 10, 0.1, 14}};
constexpr double kP6[4][6] = {{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                              {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                              {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                              {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};

template <int D>
double hartmann_impl(const Eigen::VectorXd& x, const double (&A)[4][D], const double (&P)[4][D]) {
  double f = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < D; ++j) {
      const double r = x(j) - P[i][j];
      inner += A[i][j] * r * r;
    }
    f += kAlpha[i] * std::exp(-inner);
  }
  return f;
}

}  // namespace

double hartmann(const Eigen::VectorXd& x) {
  if (x.size() == 3) return hartmann_impl<3>(x, kA3, kP3);
  if (x.size() == 6) return hartmann_impl<6>(x, kA6, kP6);
  throw InvalidArgument("hartmann: dimension must be 3 or 6");
}

namespace {

std::vector<int> iota_cols(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

const std::vector<TabularTaskInfo>& tabular_registry() {
  static const std::vector<TabularTaskInfo> reg = {
      {"material5",
       {iota_cols(5), 5},
       {{4.53, 42.8098}, {9.9995, 40.0010}, {0.5, 30.5}, {0.4989, 19.5}, {200.0, 983.0}}},
      // UCI layout: seven mixture columns, curing age (skipped), strength
      {"concrete7",
       {iota_cols(7), 8},
       {{102.0, 540.0},
        {0.0, 359.4},
        {0.0, 200.1},
        {121.8, 247.0},
        {0.0, 32.2},
        {801.0, 1145.0},
        {594.0, 992.6}}},
      {"crossbarrel4",
       {iota_cols(4), 4},
       {{6.0, 12.0}, {0.0, 200.0}, {1.5, 2.5}, {0.7, 1.4}}},
  };
  return reg;
}

TaskSpec synthetic(std::string name, gp::Bounds bounds, double (*f)(const Eigen::VectorXd&),
                   double optimum) {
  TaskSpec t;
  t.name = std::move(name);
  t.kind = TaskKind::Synthetic;
  t.bounds = std::move(bounds);
  t.evaluate = f;
  t.optimum = optimum;
  return t;
}

}  // namespace

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names = {"levy5",     "hartmann3",  "hartmann6",
                                                 "material5", "concrete7", "crossbarrel4"};
  return names;
}

bool is_tabular(std::string_view name) {
  const auto& reg = tabular_registry();
  return std::any_of(reg.begin(), reg.end(), [&](const auto& t) { return t.name == name; });
}

const TabularTaskInfo& tabular_info(std::string_view name) {
  for (const auto& t : tabular_registry()) {
    if (t.name == name) return t;
  }
  throw ConfigError("'" + std::string(name) + "' is not a tabular task");
}

TaskSpec tabular_task(std::string name, std::shared_ptr<const TabularOracle> oracle) {
  TaskSpec t;
  t.name = std::move(name);
  t.kind = TaskKind::Tabular;
  t.bounds = oracle->bounds();
  t.optimum = oracle->optimum();
  t.evaluate = [o = oracle](const Eigen::VectorXd& x) { return (*o)(x); };
  t.oracle = std::move(oracle);
  return t;
}

TaskSpec make_task(std::string_view name, const std::optional<std::filesystem::path>& data,
                   const std::optional<TableSchema>& schema) {
  if (name == "levy5") {
    return synthetic("levy5", {Eigen::VectorXd::Constant(5, -10.0), Eigen::VectorXd::Constant(5, 10.0)},
                     &levy, 0.0);
  }
  if (name == "hartmann3") return synthetic("hartmann3", gp::Bounds::unit(3), &hartmann, kHartmann3Max);
  if (name == "hartmann6") return synthetic("hartmann6", gp::Bounds::unit(6), &hartmann, kHartmann6Max);
  if (is_tabular(name)) {
    if (!data) {
      throw ConfigError("task '" + std::string(name) + "' needs a data file (--data <csv>)");
    }
    const TabularTaskInfo& info = tabular_info(name);
    const Eigen::MatrixXd table = read_table(*data, schema.value_or(info.schema));
    return tabular_task(std::string(name), std::make_shared<const TabularOracle>(table));
  }
  throw ConfigError("unknown task '" + std::string(name) + "'");
}

Eigen::MatrixXd latin_hypercube(Rng& rng, int n, int d) {
  if (n < 1 || d < 1) throw InvalidArgument("latin_hypercube: n and d must be positive");
  Eigen::MatrixXd X(n, d);
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i >= 1; --i) {
      const int k = std::min(i, static_cast<int>(rng.uniform() * (i + 1)));
      std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(k)]);
    }
    for (int i = 0; i < n; ++i) {
      X(i, j) = (perm[static_cast<std::size_t>(i)] + rng.uniform()) / n;
    }
  }
  return X;
}

Eigen::MatrixXd latin_hypercube(std::uint64_t seed, int n, int d) {
  Rng rng(seed);
  return latin_hypercube(rng, n, d);
}

}  // namespace oscbo::tasks
