#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "oscbo/error.hpp"
#include "oscbo/gp.hpp"

using namespace oscbo;
using gp::GpPosterior;
using gp::KernelSpec;
using gp::Smoothness;

namespace {

Eigen::VectorXd iso(double v) { return Eigen::VectorXd::Constant(1, v); }

}  // namespace

TEST(Kernel, ClosedForms) {
  const Eigen::VectorXd a = Eigen::VectorXd::Zero(1), b = Eigen::VectorXd::Ones(1);
  EXPECT_DOUBLE_EQ(gp::kernel_eval(KernelSpec::isotropic(0.7), a, a), 1.0);
  EXPECT_NEAR(gp::kernel_eval(KernelSpec::isotropic(1.0), a, b), 0.5239941088318203, 1e-15);
  EXPECT_NEAR(gp::kernel_eval(KernelSpec::isotropic(1.0, Smoothness::Half), a, b), std::exp(-1.0), 1e-15);
  const double s3 = std::sqrt(3.0);
  EXPECT_NEAR(gp::kernel_eval(KernelSpec::isotropic(1.0, Smoothness::ThreeHalves), a, b),
              (1 + s3) * std::exp(-s3), 1e-15);
}

TEST(Kernel, ArdMatchesOracle) {
  std::mt19937_64 g(1);
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd x = oracle::uniform_matrix(g, 4, 1), y = oracle::uniform_matrix(g, 4, 1);
    const Eigen::VectorXd ls = 0.05 + oracle::uniform_matrix(g, 4, 1).array() * 2.0;
    EXPECT_NEAR(gp::kernel_eval(KernelSpec::with_lengthscale(ls), x, y), oracle::kern(x, y, ls), 1e-14);
  }
}

TEST(Kernel, RejectsBadLengthscale) {
  EXPECT_THROW(KernelSpec::isotropic(0.0).validate(), InvalidKernel);
  EXPECT_THROW(KernelSpec::isotropic(-1.0).validate(), InvalidKernel);
  EXPECT_THROW(KernelSpec::with_lengthscale(Eigen::Vector2d(1, 1)).validate(3), InvalidKernel);
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
  EXPECT_THROW(gp::kernel_eval(KernelSpec::isotropic(-0.5), x, x), InvalidKernel);
}

TEST(Kernel, MatrixShapes) {
  const auto spec = KernelSpec::isotropic(0.3);
  EXPECT_EQ(gp::kernel_matrix(spec, Eigen::MatrixXd(0, 2)).size(), 0);
  EXPECT_EQ(gp::kernel_matrix(spec, Eigen::MatrixXd::Zero(1, 2)), Eigen::MatrixXd::Ones(1, 1));
  Eigen::MatrixXd X(2, 2);
  X << 0.3, 0.4, 0.3, 0.4;
  EXPECT_EQ(gp::kernel_matrix(spec, X), Eigen::MatrixXd::Ones(2, 2));
  std::mt19937_64 g(2);
  const Eigen::MatrixXd R = oracle::uniform_matrix(g, 9, 3);
  const Eigen::MatrixXd K = gp::kernel_matrix(spec, R);
  EXPECT_EQ(K, K.transpose());
  EXPECT_TRUE((K.diagonal().array() == 1.0).all());
  EXPECT_TRUE((K.array() <= 1.0).all());
}

TEST(Posterior, EmptyIsPrior) {
  const GpPosterior post(KernelSpec::isotropic(0.2), 0.01, 2);
  const auto p = post.predict(Eigen::Vector2d(0.3, 0.9));
  EXPECT_EQ(p.mean, 0.0);
  EXPECT_EQ(p.latent_var, 1.0);
  EXPECT_EQ(post.log_marginal_likelihood(), 0.0);
}

TEST(Posterior, SinglePointClosedForm) {
  const Eigen::MatrixXd X = Eigen::MatrixXd::Constant(1, 1, 0.4);
  const Eigen::VectorXd y = Eigen::VectorXd::Ones(1);
  const auto post = GpPosterior::fit(X, y, KernelSpec::isotropic(0.5), 0.01);
  EXPECT_NEAR(post.weights()(0), 1.0 / 1.01, 1e-15);
  const auto p = post.predict(X.row(0).transpose());
  EXPECT_NEAR(p.mean, 1.0 / 1.01, 1e-12);
  EXPECT_NEAR(p.latent_var, 0.01 / 1.01, 1e-12);
  EXPECT_NEAR(post.log_marginal_likelihood(), -1.4189632035817517, 1e-12);
}

TEST(Posterior, WeightsSolveSystem) {
  std::mt19937_64 g(3);
  const Eigen::MatrixXd X = oracle::uniform_matrix(g, 15, 3);
  const Eigen::VectorXd y = oracle::normal_vector(g, 15);
  const auto spec = KernelSpec::isotropic(0.4);
  const auto post = GpPosterior::fit(X, y, spec, 0.01);
  const Eigen::MatrixXd Ky = gp::kernel_matrix(spec, X) + 0.01 * Eigen::MatrixXd::Identity(15, 15);
  EXPECT_LE((Ky * post.weights() - y).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((post.chol() * post.chol().transpose() - Ky).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Posterior, MatchesDenseInverseOracle) {
  std::mt19937_64 g(4);
  std::uniform_int_distribution<int> nd(1, 30), dd(1, 5);
  std::uniform_real_distribution<double> ld(0.05, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = nd(g), d = dd(g);
    const Eigen::MatrixXd X = oracle::uniform_matrix(g, n, d);
    const Eigen::VectorXd y = oracle::normal_vector(g, n);
    const Eigen::VectorXd ls = trial % 3 == 0 ? Eigen::VectorXd(iso(ld(g))) : Eigen::VectorXd(
        (oracle::uniform_matrix(g, d, 1).array() * 1.5 + 0.05).matrix());
    const auto post = GpPosterior::fit(X, y, KernelSpec::with_lengthscale(ls), 0.01);
    for (int q = 0; q < 5; ++q) {
      const Eigen::VectorXd x = oracle::uniform_matrix(g, d, 1);
      const auto a = post.predict(x);
      const auto b = oracle::dense_predict(X, y, ls, 0.01, x);
      EXPECT_NEAR(a.mean, b.mean, 1e-8);
      EXPECT_NEAR(a.latent_var, std::clamp(b.var, 0.0, 1.0), 1e-8);
    }
  }
}

TEST(Posterior, LmlMatchesDenseOracle) {
  std::mt19937_64 g(5);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::MatrixXd X = oracle::uniform_matrix(g, 8, 2);
    const Eigen::VectorXd y = oracle::normal_vector(g, 8);
    const double th = 0.1 + 0.1 * trial;
    const auto post = GpPosterior::fit(X, y, KernelSpec::isotropic(th), 0.01);
    EXPECT_NEAR(post.log_marginal_likelihood(), oracle::dense_lml(X, y, iso(th), 0.01), 1e-9);
  }
}

TEST(Posterior, VarianceNeverGrowsWithData) {
  std::mt19937_64 g(6);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::MatrixXd X = oracle::uniform_matrix(g, 12, 2);
    const Eigen::VectorXd y = oracle::normal_vector(g, 12);
    const auto spec = KernelSpec::isotropic(0.3);
    const Eigen::MatrixXd probes = oracle::uniform_matrix(g, 10, 2);
    for (int n = 1; n < 12; ++n) {
      const auto a = GpPosterior::fit(X.topRows(n), y.head(n), spec, 0.01);
      const auto b = GpPosterior::fit(X.topRows(n + 1), y.head(n + 1), spec, 0.01);
      for (int i = 0; i < probes.rows(); ++i) {
        EXPECT_LE(b.predict(probes.row(i).transpose()).latent_var,
                  a.predict(probes.row(i).transpose()).latent_var + 1e-10);
      }
    }
  }
}

TEST(Posterior, InterpolatesWithTinyNoise) {
  Eigen::MatrixXd X(6, 1);
  X << 0.0, 0.2, 0.4, 0.6, 0.8, 1.0;
  const Eigen::VectorXd y = (X.col(0).array() * 6.0).sin().matrix();
  const auto post = GpPosterior::fit(X, y, KernelSpec::isotropic(0.1), 1e-10);
  for (int i = 0; i < 6; ++i) EXPECT_LE(std::abs(post.predict(X.row(i).transpose()).mean - y(i)), 1e-4);
}

TEST(Posterior, JitterEscalationReportsLevels) {
  Eigen::MatrixXd K(2, 2);
  K << 1.0, 2.0, 2.0, 1.0;
  try {
    gp::factorize_with_jitter(K, 0.01);
    FAIL() << "expected NumericalFailure";
  } catch (const NumericalFailure& e) {
    EXPECT_EQ(e.attempted_jitter(), (std::vector<double>{0.0, 1e-10, 1e-8, 1e-6}));
  }
  // a duplicated design is fine with noise
  Eigen::MatrixXd X(3, 1);
  X << 0.5, 0.5, 0.5;
  EXPECT_NO_THROW(GpPosterior::fit(X, Eigen::Vector3d(1, 1, 1), KernelSpec::isotropic(0.2), 0.01));
}

TEST(Transforms, ExamplesAndRoundTrip) {
  gp::Bounds b{Eigen::VectorXd::Constant(1, -10.0), Eigen::VectorXd::Constant(1, 10.0)};
  Eigen::MatrixXd X(2, 1);
  X << 0.0, 5.0;
  const auto two = gp::fit_transforms(X, Eigen::Vector2d(0.0, 2.0), b);
  EXPECT_DOUBLE_EQ(two.X(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(two.out_mean, 1.0);
  EXPECT_NEAR(two.out_std, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(two.y_std(0), -1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(two.y_std(1), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_FALSE(two.degenerate);

  const auto flat = gp::fit_transforms(X, Eigen::Vector2d(3.0, 3.0), b);
  EXPECT_EQ(flat.out_std, gp::kMinOutputStd);
  EXPECT_TRUE((flat.y_std.array() == 0.0).all());
  EXPECT_TRUE(flat.degenerate);

  const auto one = gp::fit_transforms(X.topRows(1), Eigen::VectorXd::Constant(1, 4.0), b);
  EXPECT_EQ(one.out_std, 1.0);
  EXPECT_EQ(one.out_mean, 4.0);
  EXPECT_TRUE(one.degenerate);

  std::mt19937_64 g(7);
  gp::Bounds wide{Eigen::Vector3d(-3, 0, 100), Eigen::Vector3d(5, 1e-3, 900)};
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd x = wide.lower + oracle::uniform_matrix(g, 3, 1).cwiseProduct(wide.upper - wide.lower);
    const Eigen::VectorXd back = wide.denormalize(wide.normalize(x));
    EXPECT_LE(((back - x).array().abs() / x.array().abs().max(1e-300)).maxCoeff(), 1e-12);
  }
  const Eigen::VectorXd yr = oracle::normal_vector(g, 20).array() * 40 + 7;
  const auto ds = gp::fit_transforms(oracle::uniform_matrix(g, 20, 1), yr, gp::Bounds::unit(1));
  for (int i = 0; i < 20; ++i) EXPECT_NEAR(ds.destandardize(ds.y_std(i)), yr(i), 1e-12 * std::abs(yr(i)));
}

TEST(Mll, FiniteDifferenceGradientMatchesRichardson) {
  std::mt19937_64 g(8);
  std::uniform_real_distribution<double> ld(std::log(0.05), std::log(2.0));
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 5 + trial % 16, d = 1 + trial % 3;
    const Eigen::MatrixXd X = oracle::uniform_matrix(g, n, d);
    const auto data = gp::fit_transforms(X, oracle::normal_vector(g, n), gp::Bounds::unit(d));
    Eigen::VectorXd th(trial % 2 ? d : 1);
    for (Eigen::Index j = 0; j < th.size(); ++j) th(j) = std::exp(ld(g));
    const Eigen::VectorXd fd = gp::mll_log_gradient(data, th, Smoothness::FiveHalves, 0.01);
    for (Eigen::Index j = 0; j < th.size(); ++j) {
      auto at = [&](double du) {
        Eigen::VectorXd u = th.array().log();
        u(j) += du;
        return oracle::dense_lml(data.X, data.y_std, u.array().exp().matrix(), 0.01);
      };
      auto central = [&](double h) { return (at(h) - at(-h)) / (2 * h); };
      const double h = 1e-3;
      const double ref = (4 * central(h / 2) - central(h)) / 3;
      EXPECT_LE(std::abs(fd(j) - ref), 1e-4 * std::abs(ref) + 1e-7) << trial << ' ' << j;
    }
  }
}

TEST(Mll, RefitRecoversGeneratingLengthscale) {
  std::mt19937_64 g(9);
  const int n = 40;
  Eigen::MatrixXd X(n, 1);
  for (int i = 0; i < n; ++i) X(i, 0) = (i + 0.5) / n;
  const Eigen::MatrixXd K = oracle::gram(X, iso(0.3)) + 0.01 * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd L = K.llt().matrixL();
  const Eigen::VectorXd y = L * oracle::normal_vector(g, n);
  const auto data = gp::fit_transforms(X, y, gp::Bounds::unit(1));
  const auto box = optim::Box::uniform(1, 0.01, 10.0);

  optim::OptimizerConfig cfg{.lr = 0.01, .steps = 50, .space = optim::SearchSpace::Log};
  const auto res = gp::mll_refit(data, box, box.geometric_center(), cfg);
  EXPECT_GE(res.lengthscale(0), 0.15);
  EXPECT_LE(res.lengthscale(0), 0.6);

  // a longer run from far away lands near the dense-grid maximizer
  double best = -1e300, arg = 0;
  for (double u = std::log(0.01); u <= std::log(10.0); u += 0.002) {
    const double v = oracle::dense_lml(data.X, data.y_std, iso(std::exp(u)), 0.01);
    if (v > best) best = v, arg = std::exp(u);
  }
  cfg.lr = 0.05;
  cfg.steps = 400;
  const auto far = gp::mll_refit(data, box, iso(5.0), cfg);
  EXPECT_NEAR(std::log(far.lengthscale(0)), std::log(arg), 0.02);
  EXPECT_GE(far.mll, best - 1e-4);
}

TEST(Mll, StationaryStartAndZeroSteps) {
  std::mt19937_64 g(10);
  const auto data = gp::fit_transforms(oracle::uniform_matrix(g, 15, 1), oracle::normal_vector(g, 15),
                                       gp::Bounds::unit(1));
  const auto box = optim::Box::uniform(1, 0.01, 10.0);
  optim::OptimizerConfig long_run{.lr = 0.05, .steps = 500, .space = optim::SearchSpace::Log};
  const auto opt = gp::mll_refit(data, box, box.geometric_center(), long_run);
  optim::OptimizerConfig cfg{.lr = 0.01, .steps = 50, .space = optim::SearchSpace::Log};
  const auto again = gp::mll_refit(data, box, opt.lengthscale, cfg);
  EXPECT_LE(std::abs(again.mll - opt.mll), 1e-6);

  cfg.steps = 0;
  const Eigen::VectorXd init = iso(0.777);
  EXPECT_EQ(gp::mll_refit(data, box, init, cfg).lengthscale, init);
}
