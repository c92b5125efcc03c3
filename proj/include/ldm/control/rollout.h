#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ldm/control/constraint.h"
#include "ldm/control/mpc.h"
#include "ldm/core/grid.h"
#include "ldm/systems/dynamical_system.h"

namespace ldm {

struct PolicyStep {
  Eigen::VectorXd action;
  bool fallback{false};
};

using Policy = std::function<PolicyStep(std::span<const double> state)>;

/// Replans with the planner at every step.
Policy MpcPolicy(MpcPlanner& planner);
/// Always the greedy action on `value`; never flags a fallback.
Policy GreedyLdmPolicy(Evaluator value, std::shared_ptr<const StateActionGrid> grid);

enum class Termination { kMaxSteps, kFailure, kDomainExit };
std::string ToString(Termination t);

struct RolloutStep {
  Eigen::VectorXd state;
  Eigen::VectorXd action;
  double reward{0.0};
  double density{0.0};
  double constraint_value{0.0};
  bool fallback{false};
};

struct RolloutRecord {
  std::vector<RolloutStep> steps;
  Eigen::VectorXd final_state;
  Termination termination{Termination::kMaxSteps};

  double total_reward() const;
  /// min over steps of P(s_t, a_t); +inf for an empty rollout.
  double min_density() const;
  bool failed() const { return termination != Termination::kMaxSteps; }

  /// step,s0..,a0..,reward,density,constraint,fallback
  void WriteCsv(std::ostream& out) const;
  void WriteCsv(const std::string& path) const;
  nlohmann::json Summary() const;
};

struct RolloutOptions {
  int n_steps{100};
  RewardSpec reward;
  /// Reference density recorded at every (s_t, a_t).
  Evaluator density;
  /// Recorded per step; kNone records NaN.
  ConstraintSpec constraint;
  /// Checked on each state before acting; true ends the rollout.
  std::function<bool(std::span<const double>)> failure;
};

/// Closed loop on the true system. The rollout ends early with kDomainExit
/// when the next state leaves the grid's state bounds, or with kFailure
/// when options.failure flags the current state.
RolloutRecord Rollout(const DynamicalSystem& system, const StateActionGrid& grid,
                      const Policy& policy, const Eigen::VectorXd& start,
                      const RolloutOptions& options);

/// Failure when every grid action at the state has zero density.
std::function<bool(std::span<const double>)> ZeroDensityFailure(
    Evaluator density, std::shared_ptr<const StateActionGrid> grid);

}  // namespace ldm
