#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ldm/core/grid.h"

namespace ldm {

enum class FieldRole { kDensity, kEnergy, kLdm, kGeneric };

std::string ToString(FieldRole role);
FieldRole FieldRoleFromString(const std::string& name);

/// Per-cell scalar values over a shared grid. Immutable once built.
///
/// Lookups outside the grid return 0 for density fields and the sentinel
/// for every other role; inside, values are interpolated by the requested
/// rule.
class ScalarField {
 public:
  ScalarField(std::shared_ptr<const StateActionGrid> grid, std::vector<double> values,
              FieldRole role, double sentinel);

  const StateActionGrid& grid() const { return *grid_; }
  const std::shared_ptr<const StateActionGrid>& grid_ptr() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t cell) const { return values_[cell]; }
  FieldRole role() const { return role_; }
  double sentinel() const { return sentinel_; }
  double OffDomainValue() const { return role_ == FieldRole::kDensity ? 0.0 : sentinel_; }

  double Lookup(std::span<const double> state, std::span<const double> action,
                Interpolation mode = Interpolation::kMultilinear) const;
  double Lookup(const Eigen::VectorXd& state, const Eigen::VectorXd& action,
                Interpolation mode = Interpolation::kMultilinear) const;

  /// Value at an off-grid state paired with a grid action.
  double LookupAtAction(const StateStencil& stencil, std::size_t action_index) const;

  struct ActionMin {
    double value;
    std::size_t action_index;
  };
  /// min over grid actions a' of the interpolated value at (state, a');
  /// ties resolve to the lowest action index.
  ActionMin MinOverActions(const StateStencil& stencil) const;
  ActionMin MaxOverActions(const StateStencil& stencil) const;

  double MinValue() const;
  double MaxValue() const;

  /// Same grid object, or grids with identical axes.
  bool SameGrid(const ScalarField& other) const;

 private:
  // Interpolation round-off can overshoot the sentinel by an ulp.
  double Clip(double v) const {
    return role_ == FieldRole::kDensity || v <= sentinel_ ? v : sentinel_;
  }

  std::shared_ptr<const StateActionGrid> grid_;
  std::vector<double> values_;
  FieldRole role_;
  double sentinel_;
};

}  // namespace ldm
