#pragma once

#include <memory>

#include "ldm/core/dataset.h"
#include "ldm/systems/dynamical_system.h"

namespace ldm {

struct FittedLinearModel {
  std::shared_ptr<LinearSystem> model;
  double residual_rmse{0.0};
  std::size_t num_records{0};
};

/// Least-squares fit of s' = F s + G a over the dataset (the empirical
/// squared-error risk of the dynamics model). Throws std::invalid_argument
/// naming the first deficient regressor ("s1", "a0", ...) when the design
/// matrix is rank deficient.
FittedLinearModel FitLinearDynamics(const TransitionDataset& dataset);

}  // namespace ldm
