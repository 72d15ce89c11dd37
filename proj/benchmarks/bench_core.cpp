#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "oscbo/acquisition.hpp"
#include "oscbo/baselines.hpp"
#include "oscbo/gp.hpp"
#include "oscbo/online.hpp"
#include "oscbo/tasks.hpp"

using namespace oscbo;

namespace {

Eigen::MatrixXd uniform(std::mt19937_64& g, Eigen::Index r, Eigen::Index c) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(g);
  return m;
}

gp::Dataset data(int n, int d) {
  std::mt19937_64 g(static_cast<std::uint64_t>(n * 31 + d));
  const Eigen::MatrixXd X = uniform(g, n, d);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = tasks::hartmann(X.row(i).transpose().head(3).eval());
  return gp::fit_transforms(X, y, gp::Bounds::unit(d));
}

}  // namespace

static void BM_GpFit(benchmark::State& state) {
  const auto ds = data(static_cast<int>(state.range(0)), 3);
  const auto spec = gp::KernelSpec::isotropic(0.3);
  for (auto _ : state) benchmark::DoNotOptimize(gp::GpPosterior::fit(ds, spec, 0.01));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GpFit)->RangeMultiplier(2)->Range(16, 256)->Complexity(benchmark::oNCubed);

static void BM_GpPredict(benchmark::State& state) {
  const auto ds = data(static_cast<int>(state.range(0)), 3);
  const auto post = gp::GpPosterior::fit(ds, gp::KernelSpec::isotropic(0.3), 0.01);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(3, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(post.predict(x));
}
BENCHMARK(BM_GpPredict)->RangeMultiplier(2)->Range(16, 256);

static void BM_FtplObjective(benchmark::State& state) {
  const int t = static_cast<int>(state.range(0));
  const auto ds = data(10 + t, 3);
  const std::vector<double> lam(static_cast<std::size_t>(t), 1.0), beta(static_cast<std::size_t>(t), 2.0);
  const Eigen::VectorXd th = Eigen::VectorXd::Constant(1, 0.3), eta = Eigen::VectorXd::Zero(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(online::ftpl_objective(th, ds.X, ds.y_std, lam, beta, 0.01, 2, eta));
  }
}
BENCHMARK(BM_FtplObjective)->RangeMultiplier(2)->Range(8, 128);

static void BM_FtplNext(benchmark::State& state) {
  const int t = static_cast<int>(state.range(0));
  const auto ds = data(10 + t, 3);
  online::FtplLearner learner(optim::Box::uniform(1, 0.01, 10.0), 2, {}, {-1.0, 1.0}, 10);
  for (int j = 0; j < t; ++j) learner.observe(1.0, 2.0, 0.0);
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(learner.next(ds.X, ds.y_std, rng));
}
BENCHMARK(BM_FtplNext)->Arg(10)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_MllRefit(benchmark::State& state) {
  const auto ds = data(static_cast<int>(state.range(0)), 3);
  const auto box = optim::Box::uniform(1, 0.01, 10.0);
  const optim::OptimizerConfig cfg{.lr = 0.01, .steps = 50, .space = optim::SearchSpace::Log};
  for (auto _ : state) benchmark::DoNotOptimize(gp::mll_refit(ds, box, box.geometric_center(), cfg));
}
BENCHMARK(BM_MllRefit)->Arg(20)->Arg(60)->Arg(110)->Unit(benchmark::kMillisecond);

static void BM_MaximizeAcquisition(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto post = gp::GpPosterior::fit(data(60, d), gp::KernelSpec::isotropic(0.3), 0.01);
  const acq::AcquisitionSpec spec{acq::AcquisitionKind::Ucb, 2.0, 0.0};
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(acq::maximize_acquisition(post, spec, d, rng));
}
BENCHMARK(BM_MaximizeAcquisition)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_LooPredictive(benchmark::State& state) {
  const auto ds = data(static_cast<int>(state.range(0)), 3);
  const auto spec = gp::KernelSpec::isotropic(0.3);
  for (auto _ : state) benchmark::DoNotOptimize(baselines::loo_predictive(ds.X, ds.y_std, spec, 0.01));
}
BENCHMARK(BM_LooPredictive)->RangeMultiplier(2)->Range(16, 128);

static void BM_TabularKnn(benchmark::State& state) {
  std::mt19937_64 g(3);
  const int m = static_cast<int>(state.range(0));
  Eigen::MatrixXd t = uniform(g, m, 8);
  const tasks::TabularOracle oracle(t);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(7, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(oracle(x));
}
BENCHMARK(BM_TabularKnn)->Arg(100)->Arg(1000)->Arg(10000);
BENCHMARK_MAIN();
