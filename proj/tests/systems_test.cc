#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "ldm/systems/chain.h"
#include "ldm/systems/data_collection.h"
#include "ldm/systems/dynamical_system.h"
#include "ldm/systems/fit_dynamics.h"
#include "ldm/systems/lqr.h"

namespace ldm {
namespace {

// e^{A dt} and int_0^dt e^{A t} dt B by Taylor series.
std::pair<Eigen::Matrix2d, Eigen::Vector2d> SeriesDiscretization(const Eigen::Matrix2d& A,
                                                                 double dt) {
  Eigen::Matrix2d F = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d integral = Eigen::Matrix2d::Identity() * dt;
  Eigen::Matrix2d term = Eigen::Matrix2d::Identity();
  for (int k = 1; k < 40; ++k) {
    term = term * A * dt / k;
    F += term;
    integral += term * dt / (k + 1);
  }
  return {F, integral * Eigen::Vector2d(0.0, 1.0)};
}

GTEST_TEST(SpiralTest, MatchesSeriesDiscretization) {
  for (double beta : {0.1, 0.3}) {
    for (double omega : {1.0, 2.5}) {
      const LinearSpiralSystem sys = BuildLinearSpiral(beta, omega, 0.1);
      const auto [F, G] = SeriesDiscretization(sys.ContinuousA(), 0.1);
      EXPECT_LT((sys.F() - F).cwiseAbs().maxCoeff(), 1e-14);
      EXPECT_LT((sys.G() - G).cwiseAbs().maxCoeff(), 1e-14);
    }
  }
}

GTEST_TEST(SpiralTest, OpenLoopSpiralsOutward) {
  const LinearSpiralSystem sys = BuildLinearSpiral();
  EXPECT_GT(SpectralRadius(sys.F()), 1.0);
  Eigen::VectorXd s = Eigen::Vector2d(1.0, 0.0);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  for (int t = 0; t < 100; ++t) s = sys.Step(s, zero);
  EXPECT_NEAR(s.norm(), std::exp(0.1 * 10.0), 1e-9);
}

GTEST_TEST(LqrTest, ScalarRiccatiClosedForm) {
  // P = 1 + P - P^2 / (1 + P)  =>  P^2 = P + 1.
  Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
  const LqrController lqr = SolveLqr(one, one, one, one);
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  EXPECT_NEAR(lqr.riccati(0, 0), p, 1e-9);
  EXPECT_NEAR(lqr.gain(0, 0), p / (1.0 + p), 1e-9);
}

GTEST_TEST(LqrTest, SpiralGainStabilizesAndSolvesRiccati) {
  const LinearSpiralSystem sys = BuildLinearSpiral();
  const LqrController lqr = DefaultSpiralLqr(sys);
  EXPECT_LT(SpectralRadius(lqr.ClosedLoop(sys)), 1.0);
  const Eigen::MatrixXd& F = sys.F();
  const Eigen::MatrixXd& G = sys.G();
  const Eigen::MatrixXd& P = lqr.riccati;
  const Eigen::MatrixXd rhs = lqr.Q + F.transpose() * P * F -
                              F.transpose() * P * G * (lqr.R + G.transpose() * P * G).inverse() *
                                  G.transpose() * P * F;
  EXPECT_LT((rhs - P).cwiseAbs().maxCoeff(), 1e-8);
}

GTEST_TEST(LqrTest, UnstabilizableThrows) {
  // The unstable mode is not actuated.
  Eigen::MatrixXd F(2, 2);
  F << 2.0, 0.0, 0.0, 0.5;
  Eigen::MatrixXd G(2, 1);
  G << 0.0, 1.0;
  EXPECT_THROW(SolveLqr(F, G, Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Ones(1, 1)),
               std::runtime_error);
}

GTEST_TEST(ChainTest, DensityTableSumsToOne) {
  for (int H : {1, 2, 3, 5}) {
    for (int K : {2, 4, 32}) {
      const double eps = 1.0 / 16.0;
      if (1.0 > 2.0 * (H + 1) * eps * K) continue;
      const ChainSystem c = BuildChain(H, K, eps);
      double total = 0.0;
      for (long s = c.min_state(); s <= c.max_state(); ++s) {
        for (long a = c.min_action(); a <= c.max_action(); ++a) total += c.Density(s, a);
      }
      EXPECT_NEAR(total, 1.0, 1e-14) << "H=" << H << " K=" << K;
    }
  }
}

GTEST_TEST(ChainTest, TableValues) {
  const ChainSystem c = BuildChain(3, 32, 1.0 / 16.0);
  EXPECT_EQ(c.Density(0, -1), 0.125);
  EXPECT_EQ(c.Density(0, 1), 0.125);
  EXPECT_EQ(c.Density(-3, 0), 0.125);
  EXPECT_EQ(c.Density(3, 31), 1.0 / 256.0);
  EXPECT_EQ(c.Density(3, -1), 0.0);
  EXPECT_EQ(c.Density(1, 0), 0.0);
  EXPECT_LE(c.Density(3, 0), c.epsilon());
  EXPECT_EQ(c.Step(Eigen::VectorXd::Constant(1, 2.0), Eigen::VectorXd::Constant(1, 5.0))[0], 7.0);
}

GTEST_TEST(ChainTest, RejectsBadParameters) {
  EXPECT_THROW(BuildChain(0, 32, 0.0625), std::invalid_argument);
  EXPECT_THROW(BuildChain(3, 32, 0.0), std::invalid_argument);
  // 1/K <= 2(H+1) eps fails for K = 1 at H = 3, eps = 1/16.
  EXPECT_THROW(BuildChain(3, 1, 0.0625), std::invalid_argument);
  EXPECT_NO_THROW(BuildChain(3, 2, 0.0625));
}

GTEST_TEST(ChainTest, DatasetOnlyHasSupportedPairs) {
  const ChainSystem c = BuildChain(2, 4, 0.25);
  const TransitionDataset d = SampleChainDataset(c, 2000, 9);
  ASSERT_EQ(d.size(), 2000u);
  for (const auto& r : d.records()) {
    EXPECT_GT(c.Density(std::lround(r.state[0]), std::lround(r.action[0])), 0.0);
    EXPECT_EQ(r.next_state[0], r.state[0] + r.action[0]);
  }
  const TransitionDataset e = SampleChainDataset(c, 2000, 9);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(d[i].state, e[i].state);
}

GTEST_TEST(CollectTest, ReproducibleAndInBounds) {
  const LinearSpiralSystem sys = BuildLinearSpiral();
  const StateActionGrid grid = StateActionGrid::FromBounds(
      Eigen::Vector2d(-10, -10), Eigen::Vector2d(10, 10), {21, 21}, Eigen::VectorXd::Constant(1, -5),
      Eigen::VectorXd::Constant(1, 5), {11});
  const std::vector<DataPolicy> policies = {
      DataPolicy::ZeroMeanGaussian(1.0), DataPolicy::LqrMeanGaussian(1.0, DefaultSpiralLqr(sys).gain),
      DataPolicy::Toric()};
  for (const auto& policy : policies) {
    const TransitionDataset a = CollectDataset(sys, grid, policy, 500, 4);
    const TransitionDataset b = CollectDataset(sys, grid, policy, 500, 4);
    const TransitionDataset c = CollectDataset(sys, grid, policy, 500, 5);
    ASSERT_EQ(a.size(), 500u);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].state, b[i].state);
      EXPECT_EQ(a[i].action, b[i].action);
      differs = differs || a[i].state != c[i].state;
      EXPECT_TRUE(grid.StateInBounds({a[i].state.data(), 2}));
      EXPECT_TRUE(grid.ActionInBounds({a[i].action.data(), 1}));
      EXPECT_LT((a[i].next_state - sys.Step(a[i].state, a[i].action)).norm(), 1e-15);
    }
    EXPECT_TRUE(differs);
  }
}

GTEST_TEST(CollectTest, ToricRadiiConcentrateOnRing) {
  const LinearSpiralSystem sys = BuildLinearSpiral();
  const StateActionGrid grid = StateActionGrid::FromBounds(
      Eigen::Vector2d(-10, -10), Eigen::Vector2d(10, 10), {21, 21}, Eigen::VectorXd::Constant(1, -5),
      Eigen::VectorXd::Constant(1, 5), {11});
  const TransitionDataset d = CollectDataset(sys, grid, DataPolicy::Toric(5.0, 0.5, 1.0), 4000, 1);
  double mean_r = 0.0;
  for (const auto& r : d.records()) mean_r += r.state.norm();
  mean_r /= static_cast<double>(d.size());
  // Radial law r exp(-(r - 5)^2 / 0.5): mean is 5 + sigma_r^2 / 5 to first order.
  EXPECT_NEAR(mean_r, 5.05, 0.05);
}

GTEST_TEST(FitDynamicsTest, RecoversLinearModel) {
  const LinearSpiralSystem sys = BuildLinearSpiral();
  const StateActionGrid grid = StateActionGrid::FromBounds(
      Eigen::Vector2d(-10, -10), Eigen::Vector2d(10, 10), {21, 21}, Eigen::VectorXd::Constant(1, -5),
      Eigen::VectorXd::Constant(1, 5), {11});
  const TransitionDataset d = CollectDataset(sys, grid, DataPolicy::ZeroMeanGaussian(1.0), 300, 2);
  const FittedLinearModel fit = FitLinearDynamics(d);
  EXPECT_LT((fit.model->F() - sys.F()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((fit.model->G() - sys.G()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(fit.residual_rmse, 1e-10);
  EXPECT_EQ(fit.num_records, 300u);
}

GTEST_TEST(FitDynamicsTest, RankDeficientNamesRegressor) {
  TransitionDataset d(2, 1);
  for (int i = 0; i < 10; ++i) {
    d.Add({Eigen::Vector2d(i, i * i), Eigen::VectorXd::Zero(1), Eigen::Vector2d(i, 0)});
  }
  try {
    FitLinearDynamics(d);
    FAIL() << "expected a rank-deficiency error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("a0"), std::string::npos) << e.what();
  }
}

GTEST_TEST(FiniteSystemTest, RandomTableIsInRange) {
  const FiniteSystem sys = FiniteSystem::Random(6, 3, 42);
  std::set<int> seen;
  for (int s = 0; s < 6; ++s) {
    for (int a = 0; a < 3; ++a) {
      const int n = sys.Successor(s, a);
      EXPECT_GE(n, 0);
      EXPECT_LT(n, 6);
      EXPECT_EQ(sys.Step(Eigen::VectorXd::Constant(1, s), Eigen::VectorXd::Constant(1, a))[0], n);
    }
  }
}

}  // namespace
}  // namespace ldm
