#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "oscbo/error.hpp"
#include "oscbo/tasks.hpp"

using namespace oscbo;
using namespace oscbo::tasks;

namespace {

Eigen::MatrixXd rows(std::initializer_list<std::initializer_list<double>> r) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("oscbo_tab_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::filesystem::path write(const std::string& name, const std::string& body) const {
    std::ofstream(path_ / name) << body;
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace

TEST(TabularOracle, GridCenterIsMultilinear) {
  const TabularOracle o(rows({{0, 0, 0}, {1, 0, 1}, {0, 1, 2}, {1, 1, 3}}), 4);
  EXPECT_EQ(o.mode(), OracleMode::Multilinear);
  EXPECT_DOUBLE_EQ(o(Eigen::Vector2d(0.5, 0.5)), 1.5);
  EXPECT_DOUBLE_EQ(o(Eigen::Vector2d(0.25, 0.0)), 0.25);
  EXPECT_DOUBLE_EQ(o(Eigen::Vector2d(1.0, 0.75)), 2.5);
  EXPECT_EQ(o(Eigen::Vector2d(1, 1)), 3.0);
}

TEST(TabularOracle, GridVerticesAndUnevenLevels) {
  std::mt19937_64 g(1);
  const std::vector<double> a{0.0, 0.3, 2.0}, b{-1.0, 5.0}, c{1.0, 2.0, 4.0, 8.0};
  Eigen::MatrixXd t(24, 4);
  int r = 0;
  for (double x : a)
    for (double y : b)
      for (double z : c) t.row(r++) << x, y, z, oracle::normal_vector(g, 1)(0);
  const TabularOracle o(t, 12);
  ASSERT_EQ(o.mode(), OracleMode::Multilinear);
  for (int i = 0; i < 24; ++i) EXPECT_EQ(o(t.row(i).head(3).transpose()), t(i, 3));
  // Linear along an edge
  const double lo = o(Eigen::Vector3d(0.3, -1.0, 2.0)), hi = o(Eigen::Vector3d(2.0, -1.0, 2.0));
  EXPECT_NEAR(o(Eigen::Vector3d(1.15, -1.0, 2.0)), 0.5 * (lo + hi), 1e-14);
}

TEST(TabularOracle, DuplicatesAveraged) {
  const TabularOracle o(rows({{0, 0, 1}, {0, 0, 3}, {1, 0, 7}, {0.5, 1, 9}}), 3);
  EXPECT_EQ(o.designs().rows(), 3);
  EXPECT_EQ(o(Eigen::Vector2d(0, 0)), 2.0);
  EXPECT_EQ(o.values()(0), 2.0);
}

TEST(TabularOracle, KnnEquidistantPair) {
  const TabularOracle o(rows({{0, 0, 4}, {1, 1, 6}, {0, 1, 100}}), 2);
  ASSERT_EQ(o.mode(), OracleMode::Knn);
  EXPECT_NEAR(o(Eigen::Vector2d(0.6, 0.4)), 5.0, 1e-12);
}

TEST(TabularOracle, TieAtKthNeighborKeepsFirstOccurrence) {
  const TabularOracle o(rows({{0, 0, 10}, {1, 0, 20}, {0, 1, 30}, {1, 1, 40}, {0.5, 0.2, 0}}), 1);
  ASSERT_EQ(o.mode(), OracleMode::Knn);
  // (0.5, 0) is equidistant from the first two designs
  EXPECT_NEAR(o(Eigen::Vector2d(0.5, 0.0)), 0.0, 1e-12);
  const TabularOracle p(rows({{0, 0, 10}, {1, 0, 20}, {0, 1, 30}, {1, 1, 40}, {0.5, 0.9, 0}}), 1);
  EXPECT_NEAR(p(Eigen::Vector2d(0.5, 0.0)), 10.0, 1e-12);
}

TEST(TabularOracle, MatchesBruteForceIdw) {
  std::mt19937_64 g(2);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 20 + trial, d = 2 + trial % 4;
    Eigen::MatrixXd t(m, d + 1);
    t.leftCols(d) = oracle::uniform_matrix(g, m, d) * 7.0;
    t.col(d) = oracle::normal_vector(g, m);
    const TabularOracle o(t, 12);
    ASSERT_EQ(o.mode(), OracleMode::Knn);
    const Eigen::VectorXd lo = o.bounds().lower, span = o.bounds().upper - lo;
    for (int q = 0; q < 20; ++q) {
      const Eigen::VectorXd x = lo + (oracle::uniform_matrix(g, 1, d).transpose().array() * span.array()).matrix();
      const Eigen::VectorXd xn = ((x - lo).array() / span.array()).matrix();
      EXPECT_NEAR(o(x), oracle::brute_idw(o.points_norm(), o.values(), xn, 12, 2.0, 1e-12), 1e-12);
    }
    for (int i = 0; i < m; ++i) EXPECT_EQ(o(t.row(i).head(d).transpose()), t(i, d));
  }
}

TEST(TabularOracle, ClipsToBounds) {
  std::mt19937_64 g(3);
  Eigen::MatrixXd t(15, 3);
  t.leftCols(2) = oracle::uniform_matrix(g, 15, 2);
  t.col(2) = oracle::normal_vector(g, 15);
  const TabularOracle o(t);
  Eigen::Vector2d x(5.0, -3.0);
  Eigen::Vector2d c(o.bounds().upper(0), o.bounds().lower(1));
  EXPECT_EQ(o(x), o(c));
}

TEST(TabularOracle, RejectsBadTables) {
  EXPECT_THROW(TabularOracle(rows({{0, 0, 1}, {1, 1, 2}}), 3), InvalidArgument);
  EXPECT_THROW(TabularOracle(rows({{0, NAN, 1}, {1, 1, 2}, {2, 0, 3}}), 2), InvalidArgument);
  EXPECT_THROW(TabularOracle(rows({{0, 1, 1}, {1, 1, 2}, {2, 1, 3}}), 2), InvalidArgument);
}

TEST(ReadTable, ParsesSchemaColumns) {
  TempDir dir;
  const auto p = dir.write("t.csv", "a,b,c,y\n 1, 2 ,3,+4\n5,6,7,8.5e-1\n");
  const auto m = read_table(p, {{2, 0}, 3});
  ASSERT_EQ(m.rows(), 2);
  EXPECT_EQ(m.row(0), Eigen::RowVector3d(3, 1, 4));
  EXPECT_EQ(m.row(1), Eigen::RowVector3d(7, 5, 0.85));
}

TEST(ReadTable, ErrorsNameTheRow) {
  TempDir dir;
  try {
    read_table(dir.write("a.csv", "a,y\n1,2\n3\n"), {{0}, 1});
    FAIL();
  } catch (const IngestionError& e) {
    EXPECT_EQ(e.row(), 2U);
  }
  try {
    read_table(dir.write("b.csv", "a,y\n1,2\n3,4\nx,5\n"), {{0}, 1});
    FAIL();
  } catch (const IngestionError& e) {
    EXPECT_EQ(e.row(), 3U);
  }
  EXPECT_THROW(read_table(dir.write("c.csv", "a,y\n1,2abc\n"), {{0}, 1}), IngestionError);
  EXPECT_THROW(read_table("/nonexistent/t.csv", {{0}, 1}), ConfigError);
}

TEST(TabularTask, BuiltFromRegistrySchema) {
  TempDir dir;
  std::mt19937_64 g(4);
  std::string body = "c0,c1,c2,c3,y\n";
  for (int i = 0; i < 30; ++i) {
    const auto r = oracle::uniform_matrix(g, 1, 5);
    for (int j = 0; j < 5; ++j) body += std::to_string(r(0, j)) + (j < 4 ? "," : "\n");
  }
  const auto task = make_task("crossbarrel4", dir.write("cb.csv", body));
  EXPECT_EQ(task.kind, TaskKind::Tabular);
  EXPECT_EQ(task.dim(), 4);
  ASSERT_TRUE(task.oracle);
  EXPECT_EQ(task.optimum, task.oracle->optimum());
  const Eigen::VectorXd x = task.oracle->designs().row(0).transpose();
  EXPECT_EQ(task.evaluate(x), task.oracle->values()(0));
}
