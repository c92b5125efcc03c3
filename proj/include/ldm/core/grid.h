#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ldm {

/// One evenly spaced axis of nodes from `lo` to `hi` inclusive.
struct GridAxis {
  double lo{0.0};
  double hi{0.0};
  int count{0};

  double spacing() const { return count > 1 ? (hi - lo) / (count - 1) : 0.0; }
  double node(int i) const;
};

enum class Interpolation { kMultilinear, kNearest };

/// Interpolation stencil over grid nodes: flat node indices with
/// their weights. Zero-weight nodes are dropped, so an on-grid query
/// collapses to a single node with weight exactly 1.
struct StateStencil {
  bool inside{false};
  int size{0};
  std::array<std::size_t, 8> nodes{};
  std::array<double, 8> weights{};
};

/// Rectangular discretization of S x A. Cells are grid nodes; a cell index
/// is `state_index * num_actions() + action_index`, and both the state and
/// the action multi-indices are row-major (last axis fastest).
class StateActionGrid {
 public:
  StateActionGrid(std::vector<GridAxis> state_axes,
                  std::vector<GridAxis> action_axes,
                  bool allow_degenerate = false);

  /// Convenience for bounds + counts given per dimension.
  static StateActionGrid FromBounds(const Eigen::VectorXd& state_lo,
                                    const Eigen::VectorXd& state_hi,
                                    const std::vector<int>& state_counts,
                                    const Eigen::VectorXd& action_lo,
                                    const Eigen::VectorXd& action_hi,
                                    const std::vector<int>& action_counts,
                                    bool allow_degenerate = false);

  int state_dim() const { return static_cast<int>(state_axes_.size()); }
  int action_dim() const { return static_cast<int>(action_axes_.size()); }
  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }
  std::size_t num_cells() const { return num_states_ * num_actions_; }

  const std::vector<GridAxis>& state_axes() const { return state_axes_; }
  const std::vector<GridAxis>& action_axes() const { return action_axes_; }

  std::size_t CellIndex(std::size_t state_index, std::size_t action_index) const {
    return state_index * num_actions_ + action_index;
  }
  std::size_t StateOfCell(std::size_t cell) const { return cell / num_actions_; }
  std::size_t ActionOfCell(std::size_t cell) const { return cell % num_actions_; }

  Eigen::VectorXd StateNode(std::size_t state_index) const;
  Eigen::VectorXd ActionNode(std::size_t action_index) const;
  void StateNodeInto(std::size_t state_index, std::span<double> out) const;
  void ActionNodeInto(std::size_t action_index, std::span<double> out) const;

  /// Cell-center coordinates; throws std::out_of_range for a bad index.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> CellToCoords(std::size_t cell) const;

  /// Nearest cell to the given point; throws std::out_of_range when the
  /// point lies outside the grid bounds.
  std::size_t CoordsToCell(const Eigen::VectorXd& state,
                           const Eigen::VectorXd& action) const;
  std::size_t NearestStateIndex(std::span<const double> state) const;
  std::size_t NearestActionIndex(std::span<const double> action) const;

  bool StateInBounds(std::span<const double> state) const;
  bool ActionInBounds(std::span<const double> action) const;

  /// Stencil over state nodes only; `inside` is false off-domain.
  StateStencil MakeStateStencil(std::span<const double> state,
                                Interpolation mode) const;
  /// Same construction over the action axes (indices are action indices).
  StateStencil MakeActionStencil(std::span<const double> action,
                                 Interpolation mode) const;

  /// Product of state-axis extents (hi - lo); 1 for degenerate axes.
  double StateVolume() const;

  bool SameShape(const StateActionGrid& other) const;

 private:
  std::vector<GridAxis> state_axes_;
  std::vector<GridAxis> action_axes_;
  std::vector<std::size_t> state_strides_;
  std::vector<std::size_t> action_strides_;
  std::size_t num_states_{1};
  std::size_t num_actions_{1};
};

}  // namespace ldm
