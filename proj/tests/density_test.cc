#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "ldm/density/density.h"
#include "ldm/systems/chain.h"
#include "ldm/systems/data_collection.h"
#include "ldm/systems/lqr.h"

namespace ldm {
namespace {

std::shared_ptr<const StateActionGrid> SmallGrid() {
  return std::make_shared<const StateActionGrid>(StateActionGrid::FromBounds(
      Eigen::Vector2d(-2, -2), Eigen::Vector2d(2, 2), {5, 5}, Eigen::VectorXd::Constant(1, -1),
      Eigen::VectorXd::Constant(1, 1), {3}));
}

// Composite Simpson rule on [lo, hi] with n (even) panels.
template <typename Fn>
double Simpson(Fn f, double lo, double hi, int n) {
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;
}

GTEST_TEST(HistogramTest, MassesSumToOneAndFollowNearestNode) {
  const auto grid = SmallGrid();
  TransitionDataset d(2, 1);
  d.Add({Eigen::Vector2d(0.1, -0.2), Eigen::VectorXd::Constant(1, 0.3), Eigen::Vector2d::Zero()});
  d.Add({Eigen::Vector2d(0.4, 0.0), Eigen::VectorXd::Constant(1, -0.2), Eigen::Vector2d::Zero()});
  d.Add({Eigen::Vector2d(1.9, 1.6), Eigen::VectorXd::Constant(1, 0.9), Eigen::Vector2d::Zero()});
  d.Add({Eigen::Vector2d(1.7, 2.0), Eigen::VectorXd::Constant(1, 0.6), Eigen::Vector2d::Zero()});
  const ScalarField p = EstimateDensity(d, grid, DensityConfig{});
  double total = 0.0;
  for (double v : p.values()) total += v;
  EXPECT_DOUBLE_EQ(total, 1.0);
  EXPECT_EQ(p.role(), FieldRole::kDensity);
  EXPECT_DOUBLE_EQ(p[grid->CoordsToCell(Eigen::Vector2d(0, 0), Eigen::VectorXd::Zero(1))], 0.5);
  EXPECT_DOUBLE_EQ(p[grid->CoordsToCell(Eigen::Vector2d(2, 2), Eigen::VectorXd::Ones(1))], 0.5);
}

GTEST_TEST(KdeTest, SingleRecordMatchesProductGaussian) {
  const auto grid = SmallGrid();
  TransitionDataset d(2, 1);
  d.Add({Eigen::Vector2d(0, 0), Eigen::VectorXd::Zero(1), Eigen::Vector2d::Zero()});
  DensityConfig cfg;
  cfg.estimator = DensityEstimator::kGaussianKde;
  cfg.bandwidth = 0.7;
  const ScalarField p = EstimateDensity(d, grid, cfg);
  const double norm = std::pow(2.0 * std::numbers::pi * 0.49, -1.5);
  EXPECT_NEAR(p[grid->CoordsToCell(Eigen::Vector2d(0, 0), Eigen::VectorXd::Zero(1))], norm, 1e-15);
  const double q = norm * std::exp(-0.5 * (1.0 + 1.0 + 1.0) / 0.49);
  EXPECT_NEAR(p[grid->CoordsToCell(Eigen::Vector2d(1, -1), Eigen::VectorXd::Ones(1))], q, 1e-15);
}

GTEST_TEST(KdeTest, ScottBandwidthFormula) {
  TransitionDataset d(1, 1);
  for (int i = 0; i < 16; ++i) {
    d.Add({Eigen::VectorXd::Constant(1, i), Eigen::VectorXd::Constant(1, 2.0 * i), Eigen::VectorXd::Zero(1)});
  }
  const Eigen::VectorXd h = ScottBandwidth(d);
  // Sample standard deviation of 0..15 is sqrt(68 * 16 / 15 / 4) = sqrt(22.666...).
  const double sd = std::sqrt(340.0 / 15.0);
  const double factor = std::pow(16.0, -1.0 / 6.0);
  EXPECT_NEAR(h[0], factor * sd, 1e-12);
  EXPECT_NEAR(h[1], factor * 2.0 * sd, 1e-12);
}

GTEST_TEST(EstimateTest, RejectsEmptyAndMismatched) {
  const auto grid = SmallGrid();
  EXPECT_THROW(EstimateDensity(TransitionDataset(2, 1), grid, DensityConfig{}), std::invalid_argument);
  TransitionDataset d(1, 1);
  d.Add({Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)});
  EXPECT_THROW(EstimateDensity(d, grid, DensityConfig{}), std::invalid_argument);
}

GTEST_TEST(AnalyticTest, ZeroMeanGaussianNormalizes) {
  const StateActionGrid bounds = *SmallGrid();
  const AnalyticDensity p(DataPolicy::ZeroMeanGaussian(0.8), bounds);
  // Uniform over the 4 x 4 state box times N(0, 0.64) in the action.
  const double s[2] = {0.3, -1.1};
  const double mass = Simpson(
      [&](double a) {
        const double act[1] = {a};
        return p.Evaluate(s, act);
      },
      -8.0, 8.0, 2000);
  EXPECT_NEAR(mass * 16.0, 1.0, 1e-9);
}

GTEST_TEST(AnalyticTest, LqrMeanCentersOnController) {
  const StateActionGrid bounds = *SmallGrid();
  Eigen::MatrixXd gain(1, 2);
  gain << 0.5, -1.0;
  const AnalyticDensity p(DataPolicy::LqrMeanGaussian(1.0, gain), bounds);
  const double s[2] = {1.0, 0.5};
  const double mode[1] = {0.0};  // -gain * s = -(0.5 - 0.5) = 0
  const double off[1] = {0.5};
  EXPECT_GT(p.Evaluate(s, mode), p.Evaluate(s, off));
  EXPECT_NEAR(p.Evaluate(s, mode), 1.0 / 16.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15);
}

GTEST_TEST(AnalyticTest, ToricNormalizerMatchesPolarQuadrature) {
  const StateActionGrid bounds = *SmallGrid();
  for (double sr : {0.5, 1.0, 3.0}) {
    const AnalyticDensity p(DataPolicy::Toric(5.0, sr, 1.0), bounds);
    const double a0[1] = {0.0};
    const double radial = Simpson(
        [&](double r) {
          const double s[2] = {r, 0.0};
          return 2.0 * std::numbers::pi * r * p.Evaluate(s, a0);
        },
        0.0, 5.0 + 12.0 * sr, 20000);
    // Integrating the action out contributes the N(0, 1) mass.
    EXPECT_NEAR(radial * std::sqrt(2.0 * std::numbers::pi), 1.0, 1e-9) << "sigma_r=" << sr;
  }
}

GTEST_TEST(AnalyticTest, ToricModeIsOnTheRing) {
  const auto grid = std::make_shared<const StateActionGrid>(StateActionGrid::FromBounds(
      Eigen::Vector2d(-10, -10), Eigen::Vector2d(10, 10), {41, 41}, Eigen::VectorXd::Constant(1, -5),
      Eigen::VectorXd::Constant(1, 5), {11}));
  const ScalarField p = AnalyticDensity(DataPolicy::Toric(), *grid).ToField(grid);
  std::size_t best = 0;
  for (std::size_t c = 0; c < grid->num_cells(); ++c) best = p[c] > p[best] ? c : best;
  const auto [s, a] = grid->CellToCoords(best);
  EXPECT_DOUBLE_EQ(s.norm(), 5.0);
  EXPECT_EQ(a[0], 0.0);
}

GTEST_TEST(AnalyticTest, ChainTableField) {
  const ChainSystem chain = BuildChain(2, 4, 0.25);
  const auto grid = chain.MakeGrid();
  const ScalarField p = AnalyticDensity(chain).ToField(grid);
  for (std::size_t c = 0; c < grid->num_cells(); ++c) {
    const auto [s, a] = grid->CellToCoords(c);
    EXPECT_EQ(p[c], chain.Density(std::lround(s[0]), std::lround(a[0])));
  }
}

GTEST_TEST(AnalyticTest, UnknownKindThrows) {
  EXPECT_THROW(AnalyticDensity::FromJson({{"kind", "banana"}}, *SmallGrid()), std::invalid_argument);
}

GTEST_TEST(EnergyTest, NegLogWithSentinelBelowFloor) {
  const auto grid = SmallGrid();
  std::vector<double> v(grid->num_cells(), 0.25);
  v[0] = 0.0;
  v[1] = 1e-13;
  v[2] = 1.0;
  const ScalarField e = ToEnergy(ScalarField(grid, v, FieldRole::kDensity, 0.0));
  EXPECT_EQ(e.role(), FieldRole::kEnergy);
  EXPECT_DOUBLE_EQ(e.sentinel(), std::log(4.0) + kSentinelMargin);
  EXPECT_EQ(e[0], e.sentinel());
  EXPECT_EQ(e[1], e.sentinel());
  EXPECT_EQ(e[2], 0.0);
  EXPECT_DOUBLE_EQ(e[3], std::log(4.0));
  EXPECT_THROW(ToEnergy(e), std::invalid_argument);
}

// Lower energy is exactly higher density.
GTEST_TEST(EnergyTest, OrderReversing) {
  const auto grid = SmallGrid();
  const ScalarField p = AnalyticDensity(DataPolicy::ZeroMeanGaussian(1.0), *grid).ToField(grid);
  const ScalarField e = ToEnergy(p);
  for (std::size_t i = 0; i + 1 < grid->num_cells(); ++i) {
    EXPECT_EQ(p[i] < p[i + 1], e[i] > e[i + 1]);
  }
}

}  // namespace
}  // namespace ldm
