#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ldm/core/dataset.h"
#include "ldm/core/field.h"
#include "ldm/core/grid.h"

namespace ldm {

/// Pointwise function of (s, a).
using Evaluator = std::function<double(std::span<const double>, std::span<const double>)>;

/// Evaluator reading a field through its lookup rule.
Evaluator FieldEvaluator(const ScalarField& field,
                         Interpolation mode = Interpolation::kMultilinear);

class FeatureBasis {
 public:
  virtual ~FeatureBasis() = default;
  virtual int size() const = 0;
  virtual void Features(std::span<const double> state, std::span<const double> action,
                        double* out) const = 0;
  virtual nlohmann::json Describe() const = 0;
};

/// Gaussian bumps on a lattice over S x A (widths equal to the lattice
/// spacing) plus one linear term per coordinate and a bias.
class RbfBasis : public FeatureBasis {
 public:
  static constexpr int kDefaultCenters = 400;

  /// Per-axis center counts start at floor(num_centers^(1/d)) and are
  /// raised by one, axis by axis, while the product stays within
  /// `num_centers`. Degenerate axes get a single center.
  explicit RbfBasis(const StateActionGrid& bounds, int num_centers = kDefaultCenters);

  int size() const override { return static_cast<int>(centers_.rows() + dim_ + 1); }
  int num_centers() const { return static_cast<int>(centers_.rows()); }
  const std::vector<int>& lattice() const { return lattice_; }
  void Features(std::span<const double> state, std::span<const double> action,
                double* out) const override;
  nlohmann::json Describe() const override;

 private:
  int dim_;
  std::vector<int> lattice_;
  Eigen::MatrixXd centers_;
  Eigen::VectorXd inv_width_;
};

struct FittedConfig {
  int iterations{20};
  double gamma{0.99};
  double ridge{1e-8};

  void Validate() const;
  nlohmann::json ToJson() const;
  static FittedConfig FromJson(const nlohmann::json& j);
};

struct FittedLdmRun {
  /// G_0 = E, then one fitted iterate per iteration.
  std::vector<Evaluator> iterates;
  /// Per-iteration RMSE of the fit against its backup targets on the data.
  std::vector<double> fit_rmse;
  /// max_k fit_rmse: the data-based proxy for the fitting error.
  double epsilon_ls_proxy{0.0};
  const Evaluator& final() const { return iterates.back(); }
  nlohmann::json ToJson() const;
};

/// Fitted value iteration: each iterate is the ridge least-squares fit of
/// max{E(s, a), gamma * min_a' G_k(s', a')} over the dataset's records, with
/// a' ranging over the grid's action nodes and G_k(s', .) = sentinel when s'
/// leaves the grid's state bounds. Throws std::runtime_error when the normal
/// equations are singular.
FittedLdmRun FittedLdmIteration(const TransitionDataset& dataset, const Evaluator& energy,
                                const StateActionGrid& bounds,
                                std::shared_ptr<const FeatureBasis> basis,
                                const FittedConfig& config, double sentinel);

/// Same iteration with one indicator feature per grid cell (nearest node):
/// each iterate's value on a cell is the mean of that cell's targets, and
/// cells without data read as the sentinel. On finite systems whose data
/// covers every cell this reproduces tabular value iteration exactly.
FittedLdmRun FittedLdmIterationOneHot(const TransitionDataset& dataset, const Evaluator& energy,
                                      std::shared_ptr<const StateActionGrid> grid,
                                      const FittedConfig& config, double sentinel);

/// Backup targets with observation aliasing: records sharing the same
/// (o, a) pool their next observations, and each gets the average over the
/// pool of max{E(o, a), gamma * min_a' G(o', a')}.
std::vector<double> SampledExpectedBackup(const Evaluator& G, const Evaluator& energy,
                                          const TransitionDataset& dataset,
                                          const StateActionGrid& bounds, double gamma,
                                          double sentinel);

/// Continuation min_a' G(s', a') over the grid's action nodes, or the
/// sentinel when s' is outside the state bounds.
double ContinuationMin(const Evaluator& G, std::span<const double> next_state,
                       const StateActionGrid& bounds, double sentinel);

}  // namespace ldm
