#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ldm/control/constraint.h"
#include "ldm/core/grid.h"
#include "ldm/core/random.h"
#include "ldm/systems/dynamical_system.h"

namespace ldm {

/// r(s, a) = a_0 (kAction) or -||s - goal|| (kGoalDistance).
struct RewardSpec {
  enum class Kind { kAction, kGoalDistance };
  Kind kind{Kind::kAction};
  Eigen::VectorXd goal;

  static RewardSpec Action() { return RewardSpec{}; }
  static RewardSpec GoalDistance(Eigen::VectorXd goal);

  double operator()(std::span<const double> state, std::span<const double> action) const;
  nlohmann::json ToJson() const;
  static RewardSpec FromJson(const nlohmann::json& j);
};

struct GreedyChoice {
  std::size_t action_index{0};
  Eigen::VectorXd action;
  double value{0.0};
};

/// argmin over the grid's action nodes of value(state, a); ties go to the
/// lowest action index.
GreedyChoice GreedyPolicy(const Evaluator& value, const StateActionGrid& grid,
                          std::span<const double> state);

enum class PlanningDynamics { kTrueSystem, kFittedModel };
std::string ToString(PlanningDynamics d);
PlanningDynamics PlanningDynamicsFromString(const std::string& name);

struct MpcConfig {
  static constexpr int kDefaultCandidates = 1024;
  static constexpr double kDefaultEnumerationLimit = 1e5;

  int horizon{1};
  int n_candidates{kDefaultCandidates};
  /// Candidates use the grid's action nodes instead of the continuous box;
  /// all |A|^H sequences are enumerated when that count is within
  /// enumeration_limit.
  bool grid_actions{false};
  double enumeration_limit{kDefaultEnumerationLimit};
  RewardSpec reward;
  PlanningDynamics dynamics{PlanningDynamics::kTrueSystem};
  std::uint64_t seed{0};
  int jobs{1};

  void Validate() const;
  nlohmann::json ToJson() const;
  static MpcConfig FromJson(const nlohmann::json& j);
};

/// Row-major [candidate][step][action dim] action sequences.
struct CandidateBatch {
  int horizon{0};
  int action_dim{0};
  std::vector<double> actions;

  std::size_t size() const {
    return actions.size() / static_cast<std::size_t>(horizon * action_dim);
  }
  std::span<const double> Action(std::size_t candidate, int step) const {
    return {actions.data() + (candidate * horizon + step) * action_dim,
            static_cast<std::size_t>(action_dim)};
  }
};

struct CandidateScores {
  std::vector<char> feasible;
  std::vector<double> reward;
  std::size_t num_feasible() const;
};

struct MpcDecision {
  Eigen::VectorXd action;
  bool fallback{false};
  std::size_t feasible{0};
  std::size_t candidates{0};
  /// Index of the chosen candidate; meaningless under fallback.
  std::size_t chosen{0};
  double planned_reward{0.0};
};

/// Random-shooting MPC. Each Decide() draws a batch from the "mpc"
/// sub-stream of the config seed, keeps sequences satisfying the
/// constraint at every planned step, and returns the first action of the
/// best one (ties to the lowest candidate index). With no feasible sequence
/// it returns the greedy action on the constraint's own value.
class MpcPlanner {
 public:
  MpcPlanner(MpcConfig config, ConstraintSpec constraint,
             std::shared_ptr<const DynamicalSystem> model,
             std::shared_ptr<const StateActionGrid> grid);

  const MpcConfig& config() const { return config_; }
  const ConstraintSpec& constraint() const { return constraint_; }
  bool enumerates() const { return enumerate_; }

  CandidateBatch SampleBatch();
  CandidateScores Score(std::span<const double> state, const CandidateBatch& batch) const;
  CandidateScores Score(std::span<const double> state, const CandidateBatch& batch,
                        const ConstraintSpec& constraint) const;
  MpcDecision Decide(std::span<const double> state);

 private:
  MpcConfig config_;
  ConstraintSpec constraint_;
  std::shared_ptr<const DynamicalSystem> model_;
  std::shared_ptr<const StateActionGrid> grid_;
  bool enumerate_{false};
  Rng rng_;
};

}  // namespace ldm
