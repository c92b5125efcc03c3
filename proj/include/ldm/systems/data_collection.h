#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ldm/core/dataset.h"
#include "ldm/core/grid.h"
#include "ldm/systems/dynamical_system.h"

namespace ldm {

/// Data-generating law over (s, a).
///
/// The two Gaussian policies draw states uniformly over the grid's state
/// bounds (or from N(0, state_sigma^2 I) when state_sigma > 0) and actions
/// from N(mean(s), sigma^2 I), with mean 0 or -gain * s. The toric law draws
/// planar states with radial density proportional to
/// r * exp(-(r - rho)^2 / 2 sigma_r^2) and actions from N(0, sigma_a^2 I).
/// Draws falling outside the grid are discarded, so the dataset follows the
/// law conditioned on the grid.
struct DataPolicy {
  enum class Kind { kZeroMeanGaussian, kLqrMeanGaussian, kToric };

  Kind kind{Kind::kZeroMeanGaussian};
  double sigma{1.0};
  double state_sigma{0.0};
  Eigen::MatrixXd gain;
  double rho{5.0};
  double sigma_r{1.0};
  double sigma_a{1.0};

  static DataPolicy ZeroMeanGaussian(double sigma);
  static DataPolicy LqrMeanGaussian(double sigma, Eigen::MatrixXd gain);
  static DataPolicy Toric(double rho = 5.0, double sigma_r = 1.0, double sigma_a = 1.0);

  /// Action mean at a state (zero for zero-mean and toric).
  Eigen::VectorXd Mean(const Eigen::VectorXd& state, int action_dim) const;

  nlohmann::json Describe() const;
  static DataPolicy FromJson(const nlohmann::json& j);
};

std::string ToString(DataPolicy::Kind kind);

/// Samples `n_samples` in-bounds records; next states come from `system`.
/// Reproducible from `seed` (uses the "dataset" sub-stream).
TransitionDataset CollectDataset(const DynamicalSystem& system, const StateActionGrid& bounds,
                                 const DataPolicy& policy, std::size_t n_samples,
                                 std::uint64_t seed);

}  // namespace ldm
