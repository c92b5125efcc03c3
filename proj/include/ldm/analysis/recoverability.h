#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "ldm/core/field.h"
#include "ldm/systems/dynamical_system.h"

namespace ldm {

struct RecoverabilityReport {
  /// sup over trajectories of P(s_T, a_T) / P(s_0, a_0), P(s_0, a_0) > 0.
  double R{1.0};
  /// sup over cells and a' of P(f(s, a), a') / P(s, a), P(s, a) > 0.
  double r{0.0};
  std::size_t witness_start{0};
  /// Cells visited from the witness start while chasing the best reachable
  /// density (successors rounded to the nearest node off the grid).
  std::vector<std::size_t> witness_path;
  int dp_iterations{0};
  bool dp_converged{false};
  /// Max-reachable density M per cell.
  std::vector<double> max_reachable;

  nlohmann::json ToJson() const;
};

/// Max-reachability dynamic programming
///   M(s, a) = max{P(s, a), max_a' M(f(s, a), a')}
/// from M = P until the sup-norm change is at most tolerance * max P, with
/// off-grid successors read through the field's lookup rule and 0 outside
/// the domain. Throws std::invalid_argument for an all-zero density.
RecoverabilityReport ComputeRecoverability(const ScalarField& density,
                                           const DynamicalSystem& system,
                                           Interpolation mode = Interpolation::kMultilinear,
                                           double tolerance = 1e-12, int max_iterations = 100000);

}  // namespace ldm
