#include "ldm/control/mpc.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ldm/core/parallel.h"

namespace ldm {

RewardSpec RewardSpec::GoalDistance(Eigen::VectorXd goal) {
  RewardSpec r;
  r.kind = Kind::kGoalDistance;
  r.goal = std::move(goal);
  return r;
}

double RewardSpec::operator()(std::span<const double> state,
                              std::span<const double> action) const {
  if (kind == Kind::kAction) return action[0];
  if (static_cast<Eigen::Index>(state.size()) != goal.size()) {
    throw std::invalid_argument("goal dimension does not match the state");
  }
  double d2 = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double d = state[i] - goal[static_cast<Eigen::Index>(i)];
    d2 += d * d;
  }
  return -std::sqrt(d2);
}

nlohmann::json RewardSpec::ToJson() const {
  if (kind == Kind::kAction) return {{"kind", "action"}};
  return {{"kind", "goal-distance"}, {"goal", std::vector<double>(goal.data(), goal.data() + goal.size())}};
}

RewardSpec RewardSpec::FromJson(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "action") return Action();
  if (kind == "goal-distance") {
    const auto g = j.at("goal").get<std::vector<double>>();
    return GoalDistance(Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(g.size())));
  }
  throw std::invalid_argument("unknown reward kind '" + kind + "' (expected action or goal-distance)");
}

GreedyChoice GreedyPolicy(const Evaluator& value, const StateActionGrid& grid,
                          std::span<const double> state) {
  GreedyChoice best;
  best.value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd a(grid.action_dim());
  for (std::size_t i = 0; i < grid.num_actions(); ++i) {
    grid.ActionNodeInto(i, std::span<double>(a.data(), a.size()));
    const double v = value(state, std::span<const double>(a.data(), a.size()));
    if (v < best.value || i == 0) {
      best.value = v;
      best.action_index = i;
    }
  }
  best.action = grid.ActionNode(best.action_index);
  return best;
}

std::string ToString(PlanningDynamics d) {
  return d == PlanningDynamics::kTrueSystem ? "true-system" : "fitted-model";
}

PlanningDynamics PlanningDynamicsFromString(const std::string& name) {
  if (name == "true-system") return PlanningDynamics::kTrueSystem;
  if (name == "fitted-model") return PlanningDynamics::kFittedModel;
  throw std::invalid_argument("unknown dynamics '" + name + "' (expected true-system or fitted-model)");
}

void MpcConfig::Validate() const {
  if (horizon < 1) throw std::invalid_argument("mpc.horizon must be >= 1");
  if (n_candidates < 1) throw std::invalid_argument("mpc.n_candidates must be >= 1");
  if (!(enumeration_limit >= 0.0)) throw std::invalid_argument("mpc.enumeration_limit must be >= 0");
}

nlohmann::json MpcConfig::ToJson() const {
  return {{"horizon", horizon},
          {"n_candidates", n_candidates},
          {"grid_actions", grid_actions},
          {"enumeration_limit", enumeration_limit},
          {"reward", reward.ToJson()},
          {"dynamics", ToString(dynamics)},
          {"seed", seed}};
}

MpcConfig MpcConfig::FromJson(const nlohmann::json& j) {
  MpcConfig c;
  c.horizon = j.value("horizon", c.horizon);
  c.n_candidates = j.value("n_candidates", c.n_candidates);
  c.grid_actions = j.value("grid_actions", c.grid_actions);
  c.enumeration_limit = j.value("enumeration_limit", c.enumeration_limit);
  if (j.contains("reward")) c.reward = RewardSpec::FromJson(j.at("reward"));
  if (j.contains("dynamics")) c.dynamics = PlanningDynamicsFromString(j.at("dynamics").get<std::string>());
  c.seed = j.value("seed", c.seed);
  c.Validate();
  return c;
}

std::size_t CandidateScores::num_feasible() const {
  std::size_t n = 0;
  for (char f : feasible) n += f ? 1 : 0;
  return n;
}

MpcPlanner::MpcPlanner(MpcConfig config, ConstraintSpec constraint,
                       std::shared_ptr<const DynamicalSystem> model,
                       std::shared_ptr<const StateActionGrid> grid)
    : config_(std::move(config)),
      constraint_(std::move(constraint)),
      model_(std::move(model)),
      grid_(std::move(grid)),
      rng_(MakeRng(config_.seed, "mpc")) {
  config_.Validate();
  if (!model_ || !grid_) throw std::invalid_argument("planner needs a model and a grid");
  if (model_->action_dim() != grid_->action_dim() || model_->state_dim() != grid_->state_dim()) {
    throw std::invalid_argument("planning model does not match the grid dimensions");
  }
  if (config_.grid_actions) {
    const double count = std::pow(static_cast<double>(grid_->num_actions()), config_.horizon);
    enumerate_ = count <= config_.enumeration_limit;
  }
}

CandidateBatch MpcPlanner::SampleBatch() {
  CandidateBatch b;
  b.horizon = config_.horizon;
  b.action_dim = grid_->action_dim();
  const int H = b.horizon;
  const int da = b.action_dim;
  if (enumerate_) {
    const std::size_t na = grid_->num_actions();
    std::size_t n = 1;
    for (int t = 0; t < H; ++t) n *= na;
    b.actions.resize(n * H * da);
    // Candidate index read as H base-|A| digits, first step most significant.
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t rest = c;
      for (int t = H - 1; t >= 0; --t) {
        grid_->ActionNodeInto(rest % na, std::span<double>(b.actions.data() + (c * H + t) * da, da));
        rest /= na;
      }
    }
    return b;
  }
  const std::size_t n = static_cast<std::size_t>(config_.n_candidates);
  b.actions.resize(n * H * da);
  if (config_.grid_actions) {
    std::uniform_int_distribution<std::size_t> pick(0, grid_->num_actions() - 1);
    for (std::size_t k = 0; k < n * H; ++k) {
      grid_->ActionNodeInto(pick(rng_), std::span<double>(b.actions.data() + k * da, da));
    }
    return b;
  }
  std::vector<std::uniform_real_distribution<double>> u;
  for (const GridAxis& ax : grid_->action_axes()) u.emplace_back(ax.lo, ax.hi);
  for (std::size_t k = 0; k < n * H; ++k) {
    for (int i = 0; i < da; ++i) b.actions[k * da + i] = u[i](rng_);
  }
  return b;
}

CandidateScores MpcPlanner::Score(std::span<const double> state,
                                  const CandidateBatch& batch) const {
  return Score(state, batch, constraint_);
}

CandidateScores MpcPlanner::Score(std::span<const double> state, const CandidateBatch& batch,
                                  const ConstraintSpec& constraint) const {
  const std::size_t n = batch.size();
  CandidateScores out;
  out.feasible.assign(n, 0);
  out.reward.assign(n, 0.0);
  const int ds = model_->state_dim();
  ParallelFor(n, config_.jobs, [&](std::size_t begin, std::size_t end, int) {
    std::vector<double> s(ds), next(ds);
    for (std::size_t c = begin; c < end; ++c) {
      std::copy(state.begin(), state.end(), s.begin());
      bool ok = true;
      double total = 0.0;
      for (int t = 0; t < batch.horizon; ++t) {
        const auto a = batch.Action(c, t);
        if (!constraint.Satisfied(s, a)) {
          ok = false;
          break;
        }
        total += config_.reward(s, a);
        model_->Step(s, a, next);
        s.swap(next);
      }
      out.feasible[c] = ok ? 1 : 0;
      out.reward[c] = total;
    }
  });
  return out;
}

MpcDecision MpcPlanner::Decide(std::span<const double> state) {
  const CandidateBatch batch = SampleBatch();
  const CandidateScores scores = Score(state, batch);
  MpcDecision d;
  d.candidates = batch.size();
  d.feasible = scores.num_feasible();
  if (d.feasible == 0) {
    d.fallback = true;
    d.action = GreedyPolicy(constraint_.value, *grid_, state).action;
    return d;
  }
  bool found = false;
  for (std::size_t c = 0; c < batch.size(); ++c) {
    if (!scores.feasible[c]) continue;
    if (!found || scores.reward[c] > d.planned_reward) {
      found = true;
      d.chosen = c;
      d.planned_reward = scores.reward[c];
    }
  }
  const auto a0 = batch.Action(d.chosen, 0);
  d.action = Eigen::Map<const Eigen::VectorXd>(a0.data(), static_cast<Eigen::Index>(a0.size()));
  return d;
}

}  // namespace ldm
