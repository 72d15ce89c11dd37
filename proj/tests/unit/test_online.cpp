#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "oscbo/error.hpp"
#include "oscbo/online.hpp"

using namespace oscbo;
using namespace oscbo::online;

TEST(RhoTilde, Examples) {
  EXPECT_NEAR(rho_tilde(0.5, 150), 0.28574404296987993, 1e-15);
  EXPECT_EQ(rho_tilde(1.0, 16), 0.5);
  EXPECT_NEAR(rho_tilde(0.01, 10000), 0.1, 1e-15);
  for (int T : {1, 10, 100, 1000}) {
    for (double r : {0.01, 0.3, 1.0}) EXPECT_GE(rho_tilde(r, T), std::pow(T, -0.25));
  }
  EXPECT_THROW(rho_tilde(0.0, 10), InvalidArgument);
  EXPECT_THROW(rho_tilde(0.5, 0), InvalidArgument);
}

TEST(Concentration, Examples) {
  EXPECT_EQ(concentration_term(1, 18.0), 0.0);
  EXPECT_NEAR(concentration_term(100, 1.0 / 30), 111.36214621327842, 1e-9);
  EXPECT_GT(concentration_term(200, 0.05), concentration_term(100, 0.05));
}

TEST(Budget, Examples) {
  const double rt = rho_tilde(0.5, 150);
  EXPECT_EQ(m_rho(rt, 150, 0.1 / 3, 1, 1, 0.0), 0.0);
  EXPECT_NEAR(m_rho(rt, 150, 0.1 / 3, 1, 1, 1.0), 2096.6355357214798, 1e-9);
  EXPECT_TRUE(std::isinf(m_rho(rt, 150, 0.1 / 3, 1, 1, INFINITY)));
  EXPECT_NEAR(m_rho(rt, 150, 0.1 / 3, 1, 1, 0.5), 0.5 * 2096.6355357214798, 1e-9);
}

TEST(FtplObjective, SinglePointSharpnessIsOne) {
  const Eigen::MatrixXd X = Eigen::MatrixXd::Constant(1, 1, 0.3);
  const std::vector<double> lam{0.0}, beta{2.0};
  const double v = ftpl_objective(Eigen::VectorXd::Constant(1, 0.5), X, Eigen::VectorXd::Ones(1),
                                  lam, beta, 0.01, 2, Eigen::VectorXd::Zero(1));
  EXPECT_NEAR(v, 1.0, 1e-14);
}

TEST(FtplObjective, PerturbationShiftsLinearly) {
  std::mt19937_64 g(1);
  const Eigen::MatrixXd X = oracle::uniform_matrix(g, 6, 2);
  const Eigen::VectorXd y = oracle::normal_vector(g, 6);
  const std::vector<double> lam{0.5, 1, 2, 0.1}, beta{2, 2, 2, 2};
  const Eigen::Vector2d th(0.3, 0.8);
  const double base = ftpl_objective(th, X, y, lam, beta, 0.01, 2, Eigen::Vector2d::Zero());
  const double shifted = ftpl_objective(th, X, y, lam, beta, 0.01, 2, Eigen::Vector2d(0.7, 0.0));
  EXPECT_NEAR(shifted, base - 0.7 * 0.3, 1e-12);
}

TEST(FtplObjective, MatchesSequentialRefits) {
  std::mt19937_64 g(2);
  std::uniform_int_distribution<int> td(1, 20), dd(1, 3), pd(0, 6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int t = td(g), d = dd(g), prefix = pd(g), p = 1 + trial % 2;
    const Eigen::MatrixXd X = oracle::uniform_matrix(g, prefix + t, d);
    const Eigen::VectorXd y = oracle::normal_vector(g, prefix + t);
    std::vector<double> lam, beta;
    for (int j = 0; j < t; ++j) {
      lam.push_back(3 * u(g));
      beta.push_back(0.2 + 3 * u(g));
    }
    Eigen::VectorXd th(trial % 3 == 0 ? d : 1);
    for (Eigen::Index j = 0; j < th.size(); ++j) th(j) = 0.05 + 1.5 * u(g);
    const double got = ftpl_objective(th, X, y, lam, beta, 0.01, p, Eigen::VectorXd::Zero(th.size()));
    const double want = oracle::sequential_lagrangian(th, X, y, lam, beta, 0.01, p);
    EXPECT_LE(std::abs(got - want), 1e-8 * (1 + std::abs(want))) << trial;
  }
}

TEST(Ftpl, EmptyHistoryPlaysGeometricCenter) {
  FtplLearner l(optim::Box::uniform(1, 0.01, 10), 2, {}, {-1, 1}, 0);
  Rng rng(1);
  const auto th = l.next(Eigen::MatrixXd(0, 1), Eigen::VectorXd(0), rng);
  EXPECT_NEAR(th(0), 0.31622776601683794, 1e-15);
  EXPECT_EQ(l.perturbation().size(), 1);
}

TEST(Ftpl, CollapsedDomainReturnsThePoint) {
  optim::Box box{Eigen::VectorXd::Constant(1, 0.4), Eigen::VectorXd::Constant(1, 0.4)};
  FtplLearner l(box, 2, {}, {-1, 1}, 0);
  Rng rng(2);
  Eigen::MatrixXd X(1, 1);
  X << 0.2;
  EXPECT_DOUBLE_EQ(l.next(Eigen::MatrixXd(0, 1), Eigen::VectorXd(0), rng)(0), 0.4);
  l.observe(1.0, 2.0, 0.3);
  EXPECT_DOUBLE_EQ(l.next(X, Eigen::VectorXd::Constant(1, 1.5), rng)(0), 0.4);
}

TEST(Ftpl, OracleNeverWorseThanWarmStart) {
  std::mt19937_64 g(3);
  Rng rng(3);
  FtplLearner l(optim::Box::uniform(1, 0.01, 10), 2, {}, {-1, 1}, 5);
  const Eigen::MatrixXd X = oracle::uniform_matrix(g, 25, 2);
  const Eigen::VectorXd y = (X.col(0).array() * 9).sin().matrix() + 0.1 * oracle::normal_vector(g, 25);
  for (int t = 0; t < 20; ++t) {
    l.next(X.topRows(5 + t), y.head(5 + t), rng);
    if (t > 0) EXPECT_LE(l.last_value(), l.last_warm_value() + 1e-12);
    EXPECT_GE(l.current()(0), 0.01);
    EXPECT_LE(l.current()(0), 10.0);
    l.observe(1.0, 2.0, 0.0);
  }
  EXPECT_THROW(l.next(X.topRows(3), y.head(3), rng), InvalidArgument);
}

TEST(Omd, ClosedFormExamples) {
  EXPECT_EQ(omd_update(0.7, 0.0, 0.001, 4.0), 0.7);
  EXPECT_NEAR(omd_update(0.5, 0.8, 0.001, 3.5), 0.5004001600426752, 1e-15);
  EXPECT_EQ(omd_update(3.49, 500.0, 0.001, 3.5), 3.5);
}

TEST(Omd, MatchesGridArgminOfLinearizedBregman) {
  std::mt19937_64 g(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double cap = 1.0 + 3.0 * u(g);
    const double prev = 0.05 + (cap - 0.05) * u(g);
    const double w = trial % 2 ? 0.001 : 0.05 + u(g);
    const double lc = 20 * u(g) - 10;
    auto obj = [&](double l) { return -lc * l + (l * std::log(l / prev) - l + prev) / w; };
    double best = 1e-6, fb = obj(best);
    for (double l = 1e-6; l <= cap; l += 1e-3) {
      if (obj(l) < fb) fb = obj(l), best = l;
    }
    if (obj(cap) < fb) fb = obj(cap), best = cap;
    const double lo = std::max(1e-6, best - 2e-3), hi = std::min(cap, best + 2e-3);
    for (double l = lo; l <= hi; l += 1e-6) {
      if (obj(l) < fb) fb = obj(l), best = l;
    }
    if (obj(hi) < fb) best = hi;
    EXPECT_NEAR(omd_update(prev, lc, w, cap), best, 1e-6) << trial;
  }
}

TEST(Omd, StaysPositive) {
  OmdDual d(1.0 / 0.3, 1.0, 0.001);
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(-1.0, 0.0);
  for (int i = 0; i < 100000; ++i) d.observe(u(g));
  EXPECT_GT(d.lambda(), 0.0);
}

TEST(Recalibrate, StoresPlayedMultiplierThenMovesDual) {
  FtplLearner p(optim::Box::uniform(1, 0.01, 10), 2, {}, {-1, 1}, 0);
  OmdDual d(3.0, 1.0, 0.001);
  recalibrate(p, d, 0.3, -0.2, 2.0);
  EXPECT_NEAR(p.utilities()[0], 0.1, 1e-15);
  EXPECT_EQ(p.lambda_history()[0], 1.0);
  EXPECT_LT(d.lambda(), 1.0);
  const double before = d.lambda();
  recalibrate(p, d, 0.4, 0.0, 2.0);
  EXPECT_EQ(d.lambda(), before);
  EXPECT_NEAR(p.utilities()[1], 0.4, 1e-15);
}

TEST(Recalibrate, IsAPureFold) {
  std::mt19937_64 g(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::pair<double, double>> fb;
  for (int i = 0; i < 50; ++i) fb.push_back({0.5 + 0.5 * u(g), u(g)});
  FtplLearner p(optim::Box::uniform(1, 0.01, 10), 2, {}, {-1, 1}, 0);
  OmdDual d(3.0);
  for (auto [s, c] : fb) recalibrate(p, d, s, c, 2.0);
  double lam = 1.0;
  for (std::size_t i = 0; i < fb.size(); ++i) {
    EXPECT_EQ(p.lambda_history()[i], lam);
    EXPECT_EQ(p.utilities()[i], fb[i].first + lam * fb[i].second);
    lam = std::min(lam * std::exp(0.001 * fb[i].second), 3.0);
  }
  EXPECT_EQ(d.lambda(), lam);
}

TEST(Phase, Examples) {
  PhaseController c(0.5, 100, 0.1, {1, 1, 1});
  EXPECT_EQ(c.check(1).phase, Phase::Play);

  PhaseController aggressive(0.5714, 100, 0.1, {1, 1, 0.0});
  EXPECT_EQ(aggressive.budget(), 0.0);
  aggressive.add_violation(0.5);
  const auto s = aggressive.check(99);
  EXPECT_EQ(s.phase, Phase::Recovery);
  EXPECT_TRUE(s.reinitialize);
  aggressive.add_violation(-100.0);
  const auto s2 = aggressive.check(100);
  EXPECT_EQ(s2.phase, Phase::Recovery);
  EXPECT_FALSE(s2.reinitialize);
}

TEST(Phase, LatchedVersusLiteral) {
  PhaseController latched(0.5, 50, 0.1, {1, 1, 0.0});
  PhaseController literal(0.5, 50, 0.1, {1, 1, 0.0}, true);
  int resets_latched = 0, resets_literal = 0;
  for (int t = 1; t <= 50; ++t) {
    const auto a = latched.check(t), b = literal.check(t);
    resets_latched += a.reinitialize;
    resets_literal += b.reinitialize;
    if (latched.switched()) EXPECT_EQ(a.phase, Phase::Recovery);
    latched.add_violation(1.0);
    literal.add_violation(1.0);
  }
  EXPECT_EQ(resets_latched, 1);
  EXPECT_GT(resets_literal, 1);
}

TEST(Phase, InfiniteBudgetNeverSwitches) {
  PhaseController c(0.5, 100, 0.1, {1, 1, INFINITY});
  for (int t = 1; t <= 100; ++t) {
    EXPECT_EQ(c.check(t).phase, Phase::Play);
    c.add_violation(10.0);
  }
}

TEST(Violation, FoldMatchesRunningSum) {
  EXPECT_EQ(violation_update(0.0, -0.6), -0.6);
  EXPECT_EQ(violation_update(violation_update(0.0, 0.5), -0.5), 0.0);
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  PhaseController c(0.5, 10, 0.1, {});
  double v = 0.0, vp = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = u(g);
    c.add_violation(x);
    v += x;
    vp += std::max(x, 0.0);
  }
  EXPECT_EQ(c.violation(), v);
  EXPECT_EQ(c.violation_plus(), vp);
}
