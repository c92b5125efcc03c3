#pragma once

#include <cstddef>
#include <vector>

#include "ldm/core/field.h"
#include "ldm/systems/dynamical_system.h"

namespace ldm {

/// Finite deterministic problem: cell c = state * num_actions + action moves
/// to state successor[c], or leaves the domain when successor[c] < 0.
struct FiniteLdmProblem {
  int num_states{0};
  int num_actions{0};
  std::vector<int> successor;
  std::vector<double> energy;
  /// Energy charged once a trajectory leaves the domain.
  double sentinel{0.0};

  /// Tabulates a system on a grid whose successors all land exactly on
  /// grid nodes (or off the domain); throws std::invalid_argument otherwise.
  static FiniteLdmProblem FromGrid(const ScalarField& E, const DynamicalSystem& system);
};

struct BruteForceLimits {
  /// Cap on cells x (T + 1); larger problems are refused.
  std::size_t max_work{50'000'000};
  /// Cap on memo entries.
  std::size_t max_memo{20'000'000};
};

/// G'_T(s, a) = min over a_1..a_T of max_{0<=t<=T} gamma^t E(s_t, a_t),
/// found by searching action sequences directly. Partial sequences are
/// memoized on (cell, t, running max), so the search never splits the max
/// over time. A trajectory leaving the domain at step t <= T scores
/// gamma^t * sentinel and ends. Throws std::invalid_argument when the
/// problem exceeds `limits`.
std::vector<double> BruteForceLdm(const FiniteLdmProblem& problem, int horizon, double gamma,
                                  const BruteForceLimits& limits = {});

/// Horizon past which G'_T no longer changes: any term beyond it is
/// discounted below the smallest positive energy. Requires gamma < 1 and a
/// positive minimum energy; returns `cells + 1` for gamma == 1.
int StationaryHorizon(const FiniteLdmProblem& problem, double gamma);

}  // namespace ldm
