#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "ldm/density/density.h"
#include "ldm/solver/fitted.h"
#include "ldm/solver/solver.h"
#include "ldm/systems/chain.h"
#include "ldm/systems/data_collection.h"
#include "ldm/systems/lqr.h"

namespace ldm {
namespace {

std::span<const double> Span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

class ChainFitTest : public ::testing::Test {
 protected:
  ChainSystem chain_ = BuildChain(3, 32, 1.0 / 16.0);
  std::shared_ptr<const StateActionGrid> grid_ = chain_.MakeGrid();
  ScalarField E_ = ToEnergy(AnalyticDensity(chain_).ToField(grid_));
  TransitionDataset data_ = SampleChainDataset(chain_, 5000, 0);
};

// Data covering every supported cell reproduces tabular iteration, and the
// unsupported cells sit at the sentinel in both.
TEST_F(ChainFitTest, OneHotReproducesTabularIterates) {
  for (double gamma : {0.9, 0.99, 1.0}) {
    FittedConfig cfg;
    cfg.iterations = 8;
    cfg.gamma = gamma;
    const FittedLdmRun run =
        FittedLdmIterationOneHot(data_, FieldEvaluator(E_), grid_, cfg, E_.sentinel());
    ASSERT_EQ(run.iterates.size(), 9u);
    for (int k = 0; k <= 8; ++k) {
      const ScalarField tab = IterateLdm(E_, chain_, gamma, k);
      for (std::size_t c = 0; c < grid_->num_cells(); ++c) {
        const auto [s, a] = grid_->CellToCoords(c);
        EXPECT_EQ(run.iterates[k](Span(s), Span(a)), tab[c]) << "gamma " << gamma << " k " << k;
      }
    }
    EXPECT_EQ(run.epsilon_ls_proxy, 0.0);
  }
}

TEST_F(ChainFitTest, RbfIsDeterministic) {
  FittedConfig cfg;
  cfg.iterations = 3;
  cfg.gamma = 0.9;
  auto basis = std::make_shared<RbfBasis>(*grid_, 100);
  const FittedLdmRun a = FittedLdmIteration(data_, FieldEvaluator(E_), *grid_, basis, cfg, E_.sentinel());
  const FittedLdmRun b = FittedLdmIteration(data_, FieldEvaluator(E_), *grid_, basis, cfg, E_.sentinel());
  EXPECT_EQ(a.fit_rmse, b.fit_rmse);
  const double s[1] = {1.0}, act[1] = {1.0};
  EXPECT_EQ(a.final()(s, act), b.final()(s, act));
  EXPECT_GT(a.epsilon_ls_proxy, 0.0);
}

GTEST_TEST(RbfBasisTest, LatticeCounts) {
  const StateActionGrid g3 = StateActionGrid::FromBounds(
      Eigen::Vector2d(-10, -10), Eigen::Vector2d(10, 10), {21, 21}, Eigen::VectorXd::Constant(1, -5),
      Eigen::VectorXd::Constant(1, 5), {11});
  EXPECT_EQ(RbfBasis(g3, 400).lattice(), (std::vector<int>{8, 7, 7}));
  EXPECT_EQ(RbfBasis(g3, 27).lattice(), (std::vector<int>{3, 3, 3}));
  EXPECT_EQ(RbfBasis(g3, 1).lattice(), (std::vector<int>{1, 1, 1}));
  const RbfBasis b(g3, 400);
  EXPECT_EQ(b.num_centers(), 392);
  EXPECT_EQ(b.size(), 392 + 3 + 1);
  EXPECT_THROW(RbfBasis(g3, 0), std::invalid_argument);
}

GTEST_TEST(RbfBasisTest, FeaturesIncludeBiasAndCoordinates) {
  const StateActionGrid g = StateActionGrid::FromBounds(
      Eigen::VectorXd::Constant(1, 0), Eigen::VectorXd::Constant(1, 1), {5},
      Eigen::VectorXd::Constant(1, 0), Eigen::VectorXd::Constant(1, 1), {5});
  const RbfBasis b(g, 4);
  std::vector<double> f(b.size());
  const double s[1] = {0.0}, a[1] = {1.0};
  b.Features(s, a, f.data());
  // Bump at the center (0, 1) is exactly 1.
  double max_bump = 0.0;
  for (int i = 0; i < b.num_centers(); ++i) max_bump = std::max(max_bump, f[i]);
  EXPECT_DOUBLE_EQ(max_bump, 1.0);
  EXPECT_EQ(f[b.num_centers()], 0.0);
  EXPECT_EQ(f[b.num_centers() + 1], 1.0);
  EXPECT_EQ(f[b.num_centers() + 2], 1.0);
}

GTEST_TEST(ContinuationTest, OffDomainIsSentinel) {
  const StateActionGrid g = StateActionGrid::FromBounds(
      Eigen::VectorXd::Constant(1, 0), Eigen::VectorXd::Constant(1, 2), {3},
      Eigen::VectorXd::Constant(1, -1), Eigen::VectorXd::Constant(1, 1), {3});
  const Evaluator G = [](std::span<const double> s, std::span<const double> a) {
    return s[0] + a[0] * a[0];
  };
  const double inside[1] = {1.5}, outside[1] = {2.5};
  EXPECT_EQ(ContinuationMin(G, inside, g, 99.0), 1.5);
  EXPECT_EQ(ContinuationMin(G, outside, g, 99.0), 99.0);
}

GTEST_TEST(SampledBackupTest, AliasedRecordsShareTheirMean) {
  const StateActionGrid g = StateActionGrid::FromBounds(
      Eigen::VectorXd::Constant(1, 0), Eigen::VectorXd::Constant(1, 4), {5},
      Eigen::VectorXd::Constant(1, 0), Eigen::VectorXd::Constant(1, 0), {1}, true);
  TransitionDataset d(1, 1);
  auto add = [&](double s, double sp) {
    d.Add({Eigen::VectorXd::Constant(1, s), Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, sp)});
  };
  add(1.0, 2.0);
  add(1.0, 4.0);
  add(3.0, 9.0);
  const Evaluator G = [](std::span<const double> s, std::span<const double>) { return s[0]; };
  const Evaluator E = [](std::span<const double>, std::span<const double>) { return 0.5; };
  const std::vector<double> y = SampledExpectedBackup(G, E, d, g, 1.0, 50.0);
  EXPECT_EQ(y[0], 3.0);
  EXPECT_EQ(y[1], 3.0);
  EXPECT_EQ(y[2], 50.0);
}

GTEST_TEST(FittedConfigTest, Validation) {
  FittedConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.iterations = -1;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c = FittedConfig{};
  c.gamma = 1.01;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c = FittedConfig{};
  c.ridge = -1.0;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  EXPECT_EQ(FittedConfig::FromJson(FittedConfig{}.ToJson()).ToJson(), FittedConfig{}.ToJson());
}

GTEST_TEST(FittedTest, ZeroIterationsReturnsEnergy) {
  const ChainSystem chain = BuildChain(1, 2, 0.25);
  const auto grid = chain.MakeGrid();
  const ScalarField E = ToEnergy(AnalyticDensity(chain).ToField(grid));
  FittedConfig cfg;
  cfg.iterations = 0;
  const FittedLdmRun run = FittedLdmIteration(SampleChainDataset(chain, 100, 1), FieldEvaluator(E),
                                              *grid, std::make_shared<RbfBasis>(*grid, 9), cfg,
                                              E.sentinel());
  ASSERT_EQ(run.iterates.size(), 1u);
  const double s[1] = {0.0}, a[1] = {1.0};
  EXPECT_EQ(run.final()(s, a), E.Lookup(s, a));
}

GTEST_TEST(FittedTest, SpiralRbfFitErrorShrinksWithCenters) {
  const LinearSpiralSystem sys = BuildLinearSpiral();
  const auto grid = std::make_shared<const StateActionGrid>(StateActionGrid::FromBounds(
      Eigen::Vector2d(-10, -10), Eigen::Vector2d(10, 10), {21, 21}, Eigen::VectorXd::Constant(1, -5),
      Eigen::VectorXd::Constant(1, 5), {11}));
  const DataPolicy policy = DataPolicy::LqrMeanGaussian(1.0, DefaultSpiralLqr(sys).gain);
  const ScalarField E = ToEnergy(AnalyticDensity(policy, *grid).ToField(grid));
  const TransitionDataset d = CollectDataset(sys, *grid, policy, 3000, 0);
  FittedConfig cfg;
  cfg.iterations = 1;
  cfg.gamma = 0.9;
  const double coarse = FittedLdmIteration(d, FieldEvaluator(E), *grid,
                                           std::make_shared<RbfBasis>(*grid, 8), cfg, E.sentinel())
                            .epsilon_ls_proxy;
  const double fine = FittedLdmIteration(d, FieldEvaluator(E), *grid,
                                         std::make_shared<RbfBasis>(*grid, 400), cfg, E.sentinel())
                          .epsilon_ls_proxy;
  EXPECT_LT(fine, coarse);
}

}  // namespace
}  // namespace ldm
