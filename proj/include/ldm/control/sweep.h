#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ldm/control/constraint.h"
#include "ldm/control/mpc.h"
#include "ldm/control/rollout.h"
#include "ldm/core/dataset.h"
#include "ldm/core/grid.h"
#include "ldm/systems/dynamical_system.h"

namespace ldm {

/// Everything a threshold sweep needs about one control task.
struct SweepTask {
  std::string name;
  std::shared_ptr<const DynamicalSystem> system;
  /// Planning model; the true system when null.
  std::shared_ptr<const DynamicalSystem> model;
  std::shared_ptr<const StateActionGrid> grid;
  /// Reference density recorded along rollouts.
  Evaluator density;
  /// Constraint functions for the density and LDM kinds.
  Evaluator energy;
  Evaluator ldm;
  /// Source of the percentile thresholds.
  TransitionDataset dataset{1, 1};
  MpcConfig mpc;
  int n_steps{100};
  int rollouts_per_seed{1};
  /// Fixed start states used round-robin; when empty, starts are drawn
  /// from the dataset's states with the "sweep" sub-stream.
  std::vector<Eigen::VectorXd> starts;
  std::function<bool(std::span<const double>)> failure;
};

struct SweepRun {
  ConstraintKind kind{ConstraintKind::kNone};
  double percentile{0.0};
  std::uint64_t seed{0};
  double threshold{0.0};
  double mean_reward{0.0};
  double failure_rate{0.0};
  double min_density{0.0};
  std::size_t fallback_steps{0};
};

struct SweepSummary {
  ConstraintKind kind{ConstraintKind::kNone};
  double percentile{0.0};
  double reward_median{0.0};
  double reward_p25{0.0};
  double reward_p75{0.0};
  double failure_median{0.0};
  double failure_p25{0.0};
  double failure_p75{0.0};
};

struct SweepTable {
  std::vector<SweepRun> runs;
  std::vector<SweepSummary> summary;

  /// kind,percentile,seed,threshold,mean_reward,failure_rate,min_density,fallback_steps
  void WriteRunsCsv(std::ostream& out) const;
  /// kind,percentile,reward_median,reward_p25,reward_p75,failure_median,failure_p25,failure_p75
  void WriteSummaryCsv(std::ostream& out) const;
};

/// Runs rollouts_per_seed rollouts for every kind x percentile x seed.
/// Runs are independent and spread over `jobs` workers; the table order
/// (kind, percentile, seed) and contents do not depend on `jobs`.
SweepTable ThresholdSweep(const SweepTask& task, const std::vector<ConstraintKind>& kinds,
                          const std::vector<double>& percentiles,
                          const std::vector<std::uint64_t>& seeds, int jobs = 1);

/// Chain goal task: reward r(s, a) = a, start s = 0, exact enumeration over
/// grid actions, failure on reaching a state with zero density.
SweepTask ChainSweepTask(const class ChainSystem& chain, const ScalarField& energy,
                         const ScalarField& ldm, std::size_t dataset_size, std::uint64_t seed);

}  // namespace ldm
