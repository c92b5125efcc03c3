#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "ldm/control/constraint.h"
#include "ldm/control/mpc.h"
#include "ldm/control/rollout.h"
#include "ldm/control/sweep.h"
#include "ldm/density/density.h"
#include "ldm/solver/solver.h"
#include "ldm/systems/chain.h"

namespace ldm {
namespace {

GTEST_TEST(PercentileTest, LinearInterpolation) {
  const std::vector<double> v = {4.0, 1.0, 3.0, 2.0};
  EXPECT_DOUBLE_EQ(PercentileThreshold(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(PercentileThreshold(v, 100.0), 4.0);
  EXPECT_DOUBLE_EQ(PercentileThreshold(v, 50.0), 2.5);
  EXPECT_DOUBLE_EQ(PercentileThreshold(v, 25.0), 1.75);
  EXPECT_THROW(PercentileThreshold({}, 50.0), std::invalid_argument);
  EXPECT_THROW(PercentileThreshold(v, 101.0), std::invalid_argument);
  EXPECT_THROW(PercentileThreshold(v, std::nan("")), std::invalid_argument);
}

GTEST_TEST(PercentileTest, Monotone) {
  std::vector<double> v;
  for (int i = 0; i < 37; ++i) v.push_back(std::sin(1.7 * i));
  double prev = -1e300;
  for (double p = 0.0; p <= 100.0; p += 2.5) {
    const double t = PercentileThreshold(v, p);
    EXPECT_GE(t, prev);
    prev = t;
  }
}

GTEST_TEST(RewardTest, KindsAndJson) {
  const std::vector<double> s = {3.0, 4.0};
  const std::vector<double> a = {-0.5};
  EXPECT_EQ(RewardSpec::Action()(s, a), -0.5);
  const RewardSpec g = RewardSpec::GoalDistance(Eigen::Vector2d::Zero());
  EXPECT_DOUBLE_EQ(g(s, a), -5.0);
  const RewardSpec back = RewardSpec::FromJson(g.ToJson());
  EXPECT_DOUBLE_EQ(back(s, a), -5.0);
  EXPECT_THROW(RewardSpec::FromJson({{"kind", "speed"}}), std::invalid_argument);
}

GTEST_TEST(MpcConfigTest, JsonRoundTripAndValidation) {
  MpcConfig c;
  c.horizon = 3;
  c.n_candidates = 17;
  c.grid_actions = true;
  c.enumeration_limit = 50;
  c.reward = RewardSpec::GoalDistance(Eigen::Vector2d(1.0, 2.0));
  c.dynamics = PlanningDynamics::kFittedModel;
  c.seed = 9;
  const MpcConfig back = MpcConfig::FromJson(c.ToJson());
  EXPECT_EQ(back.ToJson(), c.ToJson());
  c.horizon = 0;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  EXPECT_THROW(PlanningDynamicsFromString("learned"), std::invalid_argument);
}

class ChainControlTest : public ::testing::Test {
 protected:
  ChainControlTest() {
    SolverConfig sc;
    sc.gamma = 1.0;
    ldm_ = std::make_unique<ScalarField>(SolveMaximalLdm(E_, chain_, sc).ldm);
  }

  RolloutRecord Run(ConstraintKind kind, double c) {
    const SweepTask task = ChainSweepTask(chain_, E_, *ldm_, 100, 0);
    const ScalarField& field = kind == ConstraintKind::kLdm ? *ldm_ : E_;
    MpcPlanner planner(task.mpc, ConstraintSpec::FromField(kind, field, -std::log(c)), task.system,
                       grid_);
    RolloutOptions opt;
    opt.n_steps = 100;
    opt.reward = task.mpc.reward;
    opt.density = task.density;
    opt.constraint = planner.constraint();
    opt.failure = task.failure;
    return Rollout(*task.system, *grid_, MpcPolicy(planner), Eigen::VectorXd::Zero(1), opt);
  }

  ChainSystem chain_ = BuildChain(3, 32, 1.0 / 16.0);
  std::shared_ptr<const StateActionGrid> grid_ = chain_.MakeGrid();
  ScalarField P_ = AnalyticDensity(chain_).ToField(grid_);
  ScalarField E_ = ToEnergy(P_);
  std::unique_ptr<ScalarField> ldm_;
};

TEST_F(ChainControlTest, FromFieldChecksRoles) {
  EXPECT_THROW(ConstraintSpec::FromField(ConstraintKind::kLdm, E_, 1.0), std::invalid_argument);
  EXPECT_THROW(ConstraintSpec::FromField(ConstraintKind::kDensity, *ldm_, 1.0), std::invalid_argument);
  EXPECT_THROW(ConstraintKindFromString("soft"), std::invalid_argument);
  const ConstraintSpec none = ConstraintSpec::None();
  const std::vector<double> s = {0.0}, a = {31.0};
  EXPECT_TRUE(none.Satisfied(s, a));
  EXPECT_TRUE(std::isnan(none.Value(s, a)));
  const ConstraintSpec d = ConstraintSpec::FromField(ConstraintKind::kDensity, E_, std::log(8.0));
  EXPECT_TRUE(d.Satisfied(s, std::vector<double>{-1.0}));
  EXPECT_FALSE(d.Satisfied(s, a));
}

TEST_F(ChainControlTest, GreedyTiesGoToLowestIndex) {
  const Evaluator flat = [](std::span<const double>, std::span<const double>) { return 1.0; };
  const GreedyChoice g = GreedyPolicy(flat, *grid_, std::vector<double>{0.0});
  EXPECT_EQ(g.action_index, 0u);
  EXPECT_EQ(g.action[0], -1.0);
  const Evaluator bowl = [](std::span<const double>, std::span<const double> a) {
    return std::abs(a[0] - 5.0);
  };
  EXPECT_EQ(GreedyPolicy(bowl, *grid_, std::vector<double>{0.0}).action[0], 5.0);
}

TEST_F(ChainControlTest, EnumerationOrderFirstStepMostSignificant) {
  MpcConfig c;
  c.horizon = 2;
  c.grid_actions = true;
  MpcPlanner planner(c, ConstraintSpec::None(), std::make_shared<const ChainSystem>(chain_), grid_);
  ASSERT_TRUE(planner.enumerates());
  const CandidateBatch b = planner.SampleBatch();
  const std::size_t na = grid_->num_actions();
  ASSERT_EQ(b.size(), na * na);
  for (std::size_t i = 0; i < b.size(); ++i) {
    EXPECT_EQ(b.Action(i, 0)[0], -1.0 + static_cast<double>(i / na));
    EXPECT_EQ(b.Action(i, 1)[0], -1.0 + static_cast<double>(i % na));
  }
  c.enumeration_limit = 10;
  c.n_candidates = 7;
  MpcPlanner sampled(c, ConstraintSpec::None(), std::make_shared<const ChainSystem>(chain_), grid_);
  EXPECT_FALSE(sampled.enumerates());
  EXPECT_EQ(sampled.SampleBatch().size(), 7u);
}

TEST_F(ChainControlTest, SamplingIsSeedDeterministic) {
  MpcConfig c;
  c.horizon = 3;
  c.n_candidates = 50;
  c.seed = 4;
  auto model = std::make_shared<const ChainSystem>(chain_);
  MpcPlanner a(c, ConstraintSpec::None(), model, grid_);
  MpcPlanner b(c, ConstraintSpec::None(), model, grid_);
  EXPECT_EQ(a.SampleBatch().actions, b.SampleBatch().actions);
  c.seed = 5;
  MpcPlanner d(c, ConstraintSpec::None(), model, grid_);
  EXPECT_NE(a.SampleBatch().actions, d.SampleBatch().actions);
}

// Fallback happens exactly when no candidate is feasible.
TEST_F(ChainControlTest, FallbackIffNoFeasibleCandidate) {
  MpcConfig c;
  c.horizon = 2;
  c.grid_actions = true;
  auto model = std::make_shared<const ChainSystem>(chain_);
  for (double thr : {0.5, std::log(8.0), std::log(256.0)}) {
    MpcPlanner planner(c, ConstraintSpec::FromField(ConstraintKind::kLdm, *ldm_, thr), model, grid_);
    for (int s = chain_.min_state(); s <= chain_.max_state(); ++s) {
      const std::vector<double> state = {static_cast<double>(s)};
      const CandidateScores scores = planner.Score(state, planner.SampleBatch());
      const MpcDecision d = planner.Decide(state);
      EXPECT_EQ(d.fallback, scores.num_feasible() == 0) << "s=" << s << " thr=" << thr;
      EXPECT_EQ(d.feasible, scores.num_feasible());
      if (!d.fallback) {
        EXPECT_TRUE(scores.feasible[d.chosen]);
        for (std::size_t i = 0; i < scores.reward.size(); ++i) {
          if (scores.feasible[i]) EXPECT_LE(scores.reward[i], d.planned_reward);
        }
      }
    }
  }
}

TEST_F(ChainControlTest, LdmConstraintStaysInSupport) {
  const RolloutRecord r = Run(ConstraintKind::kLdm, 0.125);
  EXPECT_EQ(r.termination, Termination::kMaxSteps);
  EXPECT_EQ(r.steps.size(), 100u);
  EXPECT_DOUBLE_EQ(r.min_density(), 0.125);
  EXPECT_DOUBLE_EQ(r.total_reward(), -3.0);
  EXPECT_EQ(r.final_state[0], -3.0);
  for (const RolloutStep& st : r.steps) EXPECT_FALSE(st.fallback);
}

TEST_F(ChainControlTest, DensityConstraintWandersOut) {
  const RolloutRecord r = Run(ConstraintKind::kDensity, 0.125);
  EXPECT_LE(r.min_density(), chain_.epsilon());
  bool reached_end = false;
  for (const RolloutStep& st : r.steps) reached_end |= st.state[0] == 3.0;
  EXPECT_TRUE(reached_end);
}

TEST_F(ChainControlTest, RolloutCsvFormat) {
  const RolloutRecord r = Run(ConstraintKind::kLdm, 0.125);
  std::ostringstream out;
  r.WriteCsv(out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "step,s0,a0,reward,density,constraint,fallback");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, r.steps.size());
  EXPECT_EQ(r.Summary()["termination"], ToString(r.termination));
}

TEST_F(ChainControlTest, SweepIndependentOfJobs) {
  SweepTask task = ChainSweepTask(chain_, E_, *ldm_, 200, 1);
  task.n_steps = 20;
  const std::vector<ConstraintKind> kinds = {ConstraintKind::kLdm, ConstraintKind::kDensity,
                                              ConstraintKind::kNone};
  const SweepTable a = ThresholdSweep(task, kinds, {10.0, 90.0}, {0, 1}, 1);
  const SweepTable b = ThresholdSweep(task, kinds, {10.0, 90.0}, {0, 1}, 3);
  std::ostringstream ra, rb, sa, sb;
  a.WriteRunsCsv(ra);
  b.WriteRunsCsv(rb);
  a.WriteSummaryCsv(sa);
  b.WriteSummaryCsv(sb);
  EXPECT_EQ(ra.str(), rb.str());
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(a.runs.size(), 3u * 2u * 2u);
  EXPECT_EQ(a.summary.size(), 3u * 2u);
  EXPECT_EQ(a.runs[0].kind, ConstraintKind::kLdm);
  EXPECT_EQ(a.runs[0].percentile, 10.0);
  EXPECT_EQ(a.runs[1].seed, 1u);
}

}  // namespace
}  // namespace ldm
