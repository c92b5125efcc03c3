#pragma once

#include <memory>
#include <span>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ldm/core/dataset.h"
#include "ldm/core/field.h"
#include "ldm/core/grid.h"
#include "ldm/systems/chain.h"
#include "ldm/systems/data_collection.h"

namespace ldm {

constexpr double kDefaultDensityFloor = 1e-12;
/// Margin added to the largest finite energy to form the sentinel.
constexpr double kSentinelMargin = 100.0;

enum class DensityEstimator { kHistogram, kGaussianKde, kAnalytic };

std::string ToString(DensityEstimator e);
DensityEstimator DensityEstimatorFromString(const std::string& name);

struct DensityConfig {
  DensityEstimator estimator{DensityEstimator::kHistogram};
  /// Fixed KDE bandwidth applied to every dimension; <= 0 selects Scott's
  /// rule h_j = n^(-1/(d+4)) * sigma_j.
  double bandwidth{0.0};
  double floor{kDefaultDensityFloor};

  nlohmann::json ToJson() const;
  static DensityConfig FromJson(const nlohmann::json& j);
};

/// Histogram: each record adds 1/n to its nearest grid cell, so masses sum
/// to 1. KDE: product-Gaussian kernel density evaluated at the cell nodes.
/// Throws std::invalid_argument on an empty dataset or a dimension mismatch.
ScalarField EstimateDensity(const TransitionDataset& dataset,
                            std::shared_ptr<const StateActionGrid> grid,
                            const DensityConfig& config);

/// Scott's-rule bandwidths over the concatenated (s, a) coordinates.
Eigen::VectorXd ScottBandwidth(const TransitionDataset& dataset);

/// Closed-form density of a data law, usable at arbitrary points.
class AnalyticDensity {
 public:
  enum class Kind { kZeroMeanGaussian, kLqrMeanGaussian, kToric, kChainTable };

  /// Density of the law generating `policy` datasets over `bounds`; states
  /// are uniform over the state box unless policy.state_sigma > 0.
  AnalyticDensity(const DataPolicy& policy, const StateActionGrid& bounds);
  explicit AnalyticDensity(const ChainSystem& chain);

  /// Builds from {"kind": ..., params...}; throws std::invalid_argument for
  /// an unknown kind.
  static AnalyticDensity FromJson(const nlohmann::json& j, const StateActionGrid& bounds);

  Kind kind() const { return kind_; }
  double Evaluate(std::span<const double> state, std::span<const double> action) const;
  double Evaluate(const Eigen::VectorXd& state, const Eigen::VectorXd& action) const;
  /// Evaluated at every cell node of `grid`.
  ScalarField ToField(std::shared_ptr<const StateActionGrid> grid) const;
  nlohmann::json Describe() const;

 private:
  Kind kind_;
  DataPolicy policy_;
  double state_volume_{1.0};
  std::shared_ptr<const ChainSystem> chain_;
};

std::string ToString(AnalyticDensity::Kind kind);

/// E = -log(max(P, floor)); cells with P < floor get the sentinel, which is
/// the largest finite energy plus kSentinelMargin.
ScalarField ToEnergy(const ScalarField& density, double floor = kDefaultDensityFloor);

}  // namespace ldm
