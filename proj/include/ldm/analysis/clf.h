#pragma once

#include <cstddef>
#include <memory>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ldm/core/field.h"
#include "ldm/systems/dynamical_system.h"

namespace ldm {

struct ClfResult {
  /// W(s) = min_a G(s, a) - G(s_e, a_e) on a state-only grid.
  ScalarField W;
  std::size_t equilibrium_state{0};
  double g_equilibrium{0.0};
};

/// Throws std::invalid_argument, naming the actual argmin, when G's minimum
/// is not attained at (s_e, a_e) (within `tolerance`).
ClfResult ExtractClf(const ScalarField& G, const Eigen::VectorXd& s_e, const Eigen::VectorXd& a_e,
                     double tolerance = 0.0);

struct ClfReport {
  double w_at_equilibrium{0.0};
  /// States other than s_e with W <= 0.
  std::size_t nonpositive_states{0};
  /// States where no grid action gives W(f(s, a)) <= W(s) + slack.
  std::size_t condition1_violations{0};
  double worst_condition1{0.0};
  double slack{0.0};

  bool ok() const {
    return w_at_equilibrium == 0.0 && nonpositive_states == 0 && condition1_violations == 0;
  }
  nlohmann::json ToJson() const;
};

/// Checks W(s_e) = 0, W > 0 elsewhere and the decrease condition over the
/// action nodes of `action_grid`, with W(f(s, a)) read by multilinear lookup.
ClfReport VerifyClf(const ClfResult& clf, const DynamicalSystem& system,
                    const StateActionGrid& action_grid, double slack);

}  // namespace ldm
