#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "ldm/core/dataset.h"
#include "ldm/core/field.h"
#include "ldm/core/field_io.h"
#include "ldm/core/grid.h"
#include "ldm/core/parallel.h"
#include "ldm/core/random.h"
#include "ldm/core/sublevel_set.h"

namespace ldm {
namespace {

std::shared_ptr<const StateActionGrid> PlanarGrid() {
  return std::make_shared<const StateActionGrid>(
      std::vector<GridAxis>{{-1.0, 1.0, 5}, {0.0, 2.0, 3}}, std::vector<GridAxis>{{-1.0, 1.0, 3}});
}

ScalarField AffineField(std::shared_ptr<const StateActionGrid> grid, FieldRole role) {
  std::vector<double> v(grid->num_cells());
  for (std::size_t c = 0; c < v.size(); ++c) {
    const auto [s, a] = grid->CellToCoords(c);
    v[c] = 2.0 * s[0] - 3.0 * s[1] + 0.5 * a[0] + 7.0;
  }
  return ScalarField(grid, std::move(v), role, 100.0);
}

GTEST_TEST(GridTest, CellIndexRoundTrip) {
  const auto grid = PlanarGrid();
  EXPECT_EQ(grid->num_states(), 15u);
  EXPECT_EQ(grid->num_actions(), 3u);
  for (std::size_t c = 0; c < grid->num_cells(); ++c) {
    const auto [s, a] = grid->CellToCoords(c);
    EXPECT_EQ(grid->CoordsToCell(s, a), c);
    EXPECT_EQ(grid->CellIndex(grid->StateOfCell(c), grid->ActionOfCell(c)), c);
  }
  EXPECT_THROW(grid->CellToCoords(grid->num_cells()), std::out_of_range);
  EXPECT_THROW(grid->CoordsToCell(Eigen::Vector2d(1.5, 0.0), Eigen::VectorXd::Zero(1)),
               std::out_of_range);
}

GTEST_TEST(GridTest, EndpointsAreExact) {
  const GridAxis axis{-10.0, 10.0, 201};
  EXPECT_EQ(axis.node(0), -10.0);
  EXPECT_EQ(axis.node(200), 10.0);
  EXPECT_EQ(axis.node(100), 0.0);
  EXPECT_DOUBLE_EQ(axis.spacing(), 0.1);
}

GTEST_TEST(GridTest, RowMajorLastAxisFastest) {
  const auto grid = PlanarGrid();
  EXPECT_EQ(grid->StateNode(1), Eigen::Vector2d(-1.0, 1.0));
  EXPECT_EQ(grid->StateNode(3), Eigen::Vector2d(-0.5, 0.0));
}

GTEST_TEST(GridTest, OnGridStencilIsSingleNode) {
  const auto grid = PlanarGrid();
  for (std::size_t i = 0; i < grid->num_states(); ++i) {
    const Eigen::VectorXd s = grid->StateNode(i);
    for (auto mode : {Interpolation::kMultilinear, Interpolation::kNearest}) {
      const StateStencil st = grid->MakeStateStencil({s.data(), 2}, mode);
      ASSERT_TRUE(st.inside);
      ASSERT_EQ(st.size, 1);
      EXPECT_EQ(st.nodes[0], i);
      EXPECT_EQ(st.weights[0], 1.0);
    }
  }
}

GTEST_TEST(GridTest, OffDomainStencil) {
  const auto grid = PlanarGrid();
  const double s[2] = {1.01, 0.5};
  EXPECT_FALSE(grid->MakeStateStencil(s, Interpolation::kMultilinear).inside);
  EXPECT_FALSE(grid->StateInBounds(s));
}

// Multilinear interpolation reproduces affine functions; weights form a
// partition of unity.
GTEST_TEST(FieldTest, MultilinearExactOnAffine) {
  const auto grid = PlanarGrid();
  const ScalarField f = AffineField(grid, FieldRole::kGeneric);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const double s[2] = {-1.0 + 2.0 * u(rng), 2.0 * u(rng)};
    const double a[1] = {-1.0 + 2.0 * u(rng)};
    const StateStencil st = grid->MakeStateStencil(s, Interpolation::kMultilinear);
    double wsum = 0.0;
    for (int i = 0; i < st.size; ++i) {
      EXPECT_GT(st.weights[i], 0.0);
      wsum += st.weights[i];
    }
    EXPECT_NEAR(wsum, 1.0, 1e-15);
    EXPECT_NEAR(f.Lookup(s, a), 2.0 * s[0] - 3.0 * s[1] + 0.5 * a[0] + 7.0, 1e-12);
  }
}

GTEST_TEST(FieldTest, NearestSnapsToNode) {
  const auto grid = PlanarGrid();
  const ScalarField f = AffineField(grid, FieldRole::kGeneric);
  const double s[2] = {0.2, 0.9};
  const double a[1] = {0.4};
  // Nearest node (0, 1), action 0.
  EXPECT_DOUBLE_EQ(f.Lookup(s, a, Interpolation::kNearest), 2.0 * 0.0 - 3.0 + 0.0 + 7.0);
}

GTEST_TEST(FieldTest, OffDomainValueDependsOnRole) {
  const auto grid = PlanarGrid();
  const double s[2] = {5.0, 0.0};
  const double a[1] = {0.0};
  EXPECT_EQ(AffineField(grid, FieldRole::kEnergy).Lookup(s, a), 100.0);
  EXPECT_EQ(AffineField(grid, FieldRole::kLdm).Lookup(s, a), 100.0);
  const ScalarField density(grid, std::vector<double>(grid->num_cells(), 0.5), FieldRole::kDensity,
                            0.0);
  EXPECT_EQ(density.Lookup(s, a), 0.0);
}

GTEST_TEST(FieldTest, MinOverActionsTiesToLowestIndex) {
  const auto grid = PlanarGrid();
  const ScalarField f(grid, std::vector<double>(grid->num_cells(), 4.0), FieldRole::kLdm, 10.0);
  const double s[2] = {0.3, 0.3};
  const auto m = f.MinOverActions(grid->MakeStateStencil(s, Interpolation::kMultilinear));
  EXPECT_EQ(m.value, 4.0);
  EXPECT_EQ(m.action_index, 0u);
}

GTEST_TEST(FieldTest, MinOverActionsPicksSmallest) {
  const auto grid = PlanarGrid();
  const ScalarField f = AffineField(grid, FieldRole::kLdm);
  const double s[2] = {0.0, 1.0};
  const auto st = grid->MakeStateStencil(s, Interpolation::kMultilinear);
  EXPECT_EQ(f.MinOverActions(st).action_index, 0u);
  EXPECT_EQ(f.MaxOverActions(st).action_index, 2u);
}

GTEST_TEST(SublevelSetTest, MembersAreCellsAtOrBelowThreshold) {
  const auto grid = PlanarGrid();
  const ScalarField f = AffineField(grid, FieldRole::kLdm);
  const SublevelSet set(f, 4.0);
  std::size_t expected = 0;
  for (std::size_t c = 0; c < grid->num_cells(); ++c) {
    EXPECT_EQ(set.Contains(c), f[c] <= 4.0);
    expected += f[c] <= 4.0;
  }
  EXPECT_EQ(set.size(), expected);
  EXPECT_TRUE(SublevelSet(f, -1e9).empty());
}

GTEST_TEST(FieldIoTest, RoundTripIsBitExact) {
  const auto grid = PlanarGrid();
  std::vector<double> v(grid->num_cells());
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  for (double& x : v) x = n(rng) * 1e3;
  const ScalarField f(grid, v, FieldRole::kEnergy, 12345.678901234567);
  const auto dir = std::filesystem::temp_directory_path() / "ldm_field_io_test";
  std::filesystem::create_directories(dir);
  const std::string stem = (dir / "f").string();
  WriteField(f, stem, {{"note", "x"}});
  for (const std::string& path : {stem, stem + ".csv", stem + ".json"}) {
    const ScalarField g = ReadField(path);
    EXPECT_TRUE(g.grid().SameShape(f.grid()));
    EXPECT_EQ(g.values(), f.values());
    EXPECT_EQ(g.sentinel(), f.sentinel());
    EXPECT_EQ(g.role(), FieldRole::kEnergy);
  }
  EXPECT_EQ(ReadJson(stem + ".json")["meta"]["note"], "x");
  std::filesystem::remove_all(dir);
}

GTEST_TEST(DatasetTest, BoundsRejectOutsideRecords) {
  const auto grid = PlanarGrid();
  TransitionDataset d(2, 1);
  d.SetBounds(*grid);
  EXPECT_TRUE(d.Add({Eigen::Vector2d(0.0, 1.0), Eigen::VectorXd::Zero(1), Eigen::Vector2d(9, 9)}));
  EXPECT_FALSE(d.Add({Eigen::Vector2d(2.0, 1.0), Eigen::VectorXd::Zero(1), Eigen::Vector2d(0, 0)}));
  EXPECT_FALSE(d.Add({Eigen::Vector2d(0.0, 1.0), Eigen::VectorXd::Constant(1, 3.0), Eigen::Vector2d(0, 0)}));
  EXPECT_EQ(d.size(), 1u);
  EXPECT_EQ(d.rejected(), 2u);
}

GTEST_TEST(DatasetTest, CsvRoundTrip) {
  TransitionDataset d(2, 1);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (int i = 0; i < 20; ++i) {
    d.Add({Eigen::Vector2d(n(rng), n(rng)), Eigen::VectorXd::Constant(1, n(rng)),
           Eigen::Vector2d(n(rng), n(rng))});
  }
  std::stringstream ss;
  d.WriteCsv(ss);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "s0,s1,a0,sp0,sp1");
  const TransitionDataset e = TransitionDataset::ReadCsv(ss);
  ASSERT_EQ(e.size(), d.size());
  EXPECT_EQ(e.state_dim(), 2);
  EXPECT_EQ(e.action_dim(), 1);
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(e[i].state, d[i].state);
    EXPECT_EQ(e[i].action, d[i].action);
    EXPECT_EQ(e[i].next_state, d[i].next_state);
  }
}

GTEST_TEST(RandomTest, SubstreamsAreStableAndDistinct) {
  EXPECT_EQ(SubstreamSeed(7, "mpc"), SubstreamSeed(7, "mpc"));
  EXPECT_NE(SubstreamSeed(7, "mpc"), SubstreamSeed(7, "dataset"));
  EXPECT_NE(SubstreamSeed(7, "mpc"), SubstreamSeed(8, "mpc"));
  Rng a = MakeRng(1, "sweep"), b = MakeRng(1, "sweep");
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a(), b());
}

GTEST_TEST(ParallelTest, ChunksCoverRangeOnce) {
  for (int jobs : {1, 2, 3, 7, 64}) {
    std::vector<int> hits(101, 0);
    ParallelFor(hits.size(), jobs, [&](std::size_t b, std::size_t e, int) {
      for (std::size_t i = b; i < e; ++i) ++hits[i];
    });
    for (int h : hits) EXPECT_EQ(h, 1);
  }
}

GTEST_TEST(ParallelTest, WorkerExceptionPropagates) {
  EXPECT_THROW(ParallelFor(10, 4,
                           [](std::size_t b, std::size_t, int) {
                             if (b > 0) throw std::runtime_error("boom");
                           }),
               std::runtime_error);
}

}  // namespace
}  // namespace ldm
