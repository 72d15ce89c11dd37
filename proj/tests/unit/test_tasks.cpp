#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "oscbo/error.hpp"
#include "oscbo/tasks.hpp"

using namespace oscbo;
using namespace oscbo::tasks;

namespace {
Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), out.data());
  return out;
}
}  // namespace

TEST(Levy, GoldenValues) {
  EXPECT_NEAR(levy(Eigen::VectorXd::Ones(5)), 0.0, 1e-30);
  EXPECT_NEAR(levy(Eigen::VectorXd::Constant(5, 5.0)), -33.32293673094284, 1e-11);
  EXPECT_NEAR(levy(Eigen::VectorXd::Zero(5)), -0.9883782164678979, 1e-13);
  EXPECT_NEAR(levy(vec({-10, 3, 7.5, 0, 1})), -84.79784684192299, 1e-11);
}

TEST(Levy, MaximumAtOnes) {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 20000; ++i) {
    Eigen::VectorXd x(5);
    for (auto& v : x) v = u(g);
    EXPECT_LE(levy(x), 0.0);
  }
}

TEST(Hartmann, GoldenValues) {
  EXPECT_NEAR(hartmann(Eigen::VectorXd::Zero(3)), 0.06797411659013469, 1e-14);
  EXPECT_NEAR(hartmann(Eigen::VectorXd::Constant(3, 0.5)), 0.6280220961750616, 1e-14);
  EXPECT_NEAR(hartmann(Eigen::VectorXd::Zero(6)), 0.005142009360426453, 1e-15);
  EXPECT_NEAR(hartmann(Eigen::VectorXd::Constant(6, 0.5)), 0.5316179886944402, 1e-14);
  EXPECT_THROW(hartmann(Eigen::VectorXd::Zero(4)), InvalidArgument);
}

TEST(Hartmann, OptimaAttainedAndNotExceeded) {
  EXPECT_NEAR(hartmann(vec({0.11461434, 0.55564885, 0.85254695})), kHartmann3Max, 1e-8);
  EXPECT_NEAR(hartmann(vec({0.2016853, 0.15073246, 0.47690333, 0.27533012, 0.3116516, 0.65730621})),
              kHartmann6Max, 1e-8);
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int d : {3, 6}) {
    const double opt = d == 3 ? kHartmann3Max : kHartmann6Max;
    for (int i = 0; i < 100000; ++i) {
      Eigen::VectorXd x(d);
      for (auto& v : x) v = u(g);
      ASSERT_LE(hartmann(x), opt);
    }
  }
}

TEST(LatinHypercube, OnePointPerStratum) {
  for (int n : {1, 5, 17}) {
    const Eigen::MatrixXd X = latin_hypercube(std::uint64_t{3}, n, 4);
    ASSERT_EQ(X.rows(), n);
    ASSERT_EQ(X.cols(), 4);
    for (int j = 0; j < 4; ++j) {
      std::vector<int> hit(static_cast<std::size_t>(n), 0);
      for (int i = 0; i < n; ++i) {
        ASSERT_GE(X(i, j), 0.0);
        ASSERT_LT(X(i, j), 1.0);
        ++hit[static_cast<std::size_t>(X(i, j) * n)];
      }
      EXPECT_TRUE(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));
    }
  }
}

TEST(LatinHypercube, SeedDeterminism) {
  EXPECT_EQ(latin_hypercube(std::uint64_t{7}, 10, 3), latin_hypercube(std::uint64_t{7}, 10, 3));
  EXPECT_NE(latin_hypercube(std::uint64_t{7}, 10, 3), latin_hypercube(std::uint64_t{8}, 10, 3));
  EXPECT_THROW(latin_hypercube(std::uint64_t{1}, 0, 3), InvalidArgument);
}

TEST(Registry, SyntheticTasks) {
  const auto levy5 = make_task("levy5");
  EXPECT_EQ(levy5.dim(), 5);
  EXPECT_EQ(levy5.optimum, 0.0);
  EXPECT_EQ(levy5.bounds.lower, Eigen::VectorXd::Constant(5, -10.0));
  EXPECT_EQ(levy5.bounds.upper, Eigen::VectorXd::Constant(5, 10.0));
  const auto h6 = make_task("hartmann6");
  EXPECT_EQ(h6.dim(), 6);
  EXPECT_EQ(h6.optimum, kHartmann6Max);
  EXPECT_EQ(h6.kind, TaskKind::Synthetic);
  EXPECT_EQ(make_task("hartmann3").evaluate(Eigen::VectorXd::Zero(3)), hartmann(Eigen::VectorXd::Zero(3)));
}

TEST(Registry, NamesAndErrors) {
  const auto& names = task_names();
  for (const char* n : {"levy5", "hartmann3", "hartmann6", "material5", "concrete7", "crossbarrel4"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  }
  EXPECT_TRUE(is_tabular("concrete7"));
  EXPECT_FALSE(is_tabular("levy5"));
  EXPECT_EQ(tabular_info("concrete7").schema.input_columns.size(), 7U);
  EXPECT_THROW(make_task("branin"), ConfigError);
  EXPECT_THROW(make_task("material5"), ConfigError);
  EXPECT_THROW(tabular_info("levy5"), ConfigError);
}
