#include "ldm/core/grid.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ldm {

double GridAxis::node(int i) const {
  if (count <= 1) return lo;
  if (i == count - 1) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
}

namespace {

void CheckAxes(const std::vector<GridAxis>& axes, const char* kind,
               bool allow_degenerate) {
  for (std::size_t d = 0; d < axes.size(); ++d) {
    const GridAxis& ax = axes[d];
    const std::string where = std::string(kind) + " axis " + std::to_string(d);
    if (ax.count == 1) {
      if (!allow_degenerate) {
        throw std::invalid_argument(where + ": degenerate axis (count 1) not allowed");
      }
      if (!(ax.lo <= ax.hi)) throw std::invalid_argument(where + ": lo > hi");
      continue;
    }
    if (ax.count < 2) throw std::invalid_argument(where + ": count must be >= 2");
    if (!(ax.lo < ax.hi)) throw std::invalid_argument(where + ": lo must be < hi");
  }
}

std::vector<std::size_t> Strides(const std::vector<GridAxis>& axes,
                                 std::size_t* total) {
  std::vector<std::size_t> strides(axes.size());
  std::size_t s = 1;
  for (int d = static_cast<int>(axes.size()) - 1; d >= 0; --d) {
    strides[d] = s;
    s *= static_cast<std::size_t>(axes[d].count);
  }
  *total = s;
  return strides;
}

int NearestNode(const GridAxis& ax, double x) {
  if (ax.count <= 1) return 0;
  const double t = (x - ax.lo) / (ax.hi - ax.lo) * (ax.count - 1);
  long i = std::lround(t);
  if (i < 0) i = 0;
  if (i > ax.count - 1) i = ax.count - 1;
  return static_cast<int>(i);
}

bool OnAxis(const GridAxis& ax, double x) {
  return x >= ax.lo && x <= ax.hi;
}

}  // namespace

StateActionGrid::StateActionGrid(std::vector<GridAxis> state_axes,
                                 std::vector<GridAxis> action_axes,
                                 bool allow_degenerate)
    : state_axes_(std::move(state_axes)), action_axes_(std::move(action_axes)) {
  if (state_axes_.empty()) throw std::invalid_argument("grid needs at least one state axis");
  if (state_axes_.size() > 3 || action_axes_.size() > 3) {
    throw std::invalid_argument("at most 3 state and 3 action axes supported");
  }
  CheckAxes(state_axes_, "state", allow_degenerate);
  CheckAxes(action_axes_, "action", allow_degenerate);
  state_strides_ = Strides(state_axes_, &num_states_);
  action_strides_ = Strides(action_axes_, &num_actions_);
}

StateActionGrid StateActionGrid::FromBounds(const Eigen::VectorXd& state_lo,
                                            const Eigen::VectorXd& state_hi,
                                            const std::vector<int>& state_counts,
                                            const Eigen::VectorXd& action_lo,
                                            const Eigen::VectorXd& action_hi,
                                            const std::vector<int>& action_counts,
                                            bool allow_degenerate) {
  if (state_lo.size() != state_hi.size() ||
      state_lo.size() != static_cast<Eigen::Index>(state_counts.size())) {
    throw std::invalid_argument("state bounds/counts size mismatch");
  }
  if (action_lo.size() != action_hi.size() ||
      action_lo.size() != static_cast<Eigen::Index>(action_counts.size())) {
    throw std::invalid_argument("action bounds/counts size mismatch");
  }
  std::vector<GridAxis> s, a;
  for (Eigen::Index i = 0; i < state_lo.size(); ++i) {
    s.push_back({state_lo[i], state_hi[i], state_counts[i]});
  }
  for (Eigen::Index i = 0; i < action_lo.size(); ++i) {
    a.push_back({action_lo[i], action_hi[i], action_counts[i]});
  }
  return StateActionGrid(std::move(s), std::move(a), allow_degenerate);
}

void StateActionGrid::StateNodeInto(std::size_t state_index,
                                    std::span<double> out) const {
  for (std::size_t d = 0; d < state_axes_.size(); ++d) {
    const int i = static_cast<int>((state_index / state_strides_[d]) % state_axes_[d].count);
    out[d] = state_axes_[d].node(i);
  }
}

void StateActionGrid::ActionNodeInto(std::size_t action_index,
                                     std::span<double> out) const {
  for (std::size_t d = 0; d < action_axes_.size(); ++d) {
    const int i = static_cast<int>((action_index / action_strides_[d]) % action_axes_[d].count);
    out[d] = action_axes_[d].node(i);
  }
}

Eigen::VectorXd StateActionGrid::StateNode(std::size_t state_index) const {
  Eigen::VectorXd s(state_dim());
  StateNodeInto(state_index, {s.data(), static_cast<std::size_t>(s.size())});
  return s;
}

Eigen::VectorXd StateActionGrid::ActionNode(std::size_t action_index) const {
  Eigen::VectorXd a(action_dim());
  ActionNodeInto(action_index, {a.data(), static_cast<std::size_t>(a.size())});
  return a;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> StateActionGrid::CellToCoords(
    std::size_t cell) const {
  if (cell >= num_cells()) {
    throw std::out_of_range("cell index " + std::to_string(cell) +
                            " out of range (" + std::to_string(num_cells()) + " cells)");
  }
  return {StateNode(StateOfCell(cell)), ActionNode(ActionOfCell(cell))};
}

std::size_t StateActionGrid::NearestStateIndex(std::span<const double> state) const {
  std::size_t idx = 0;
  for (std::size_t d = 0; d < state_axes_.size(); ++d) {
    idx += static_cast<std::size_t>(NearestNode(state_axes_[d], state[d])) * state_strides_[d];
  }
  return idx;
}

std::size_t StateActionGrid::NearestActionIndex(std::span<const double> action) const {
  std::size_t idx = 0;
  for (std::size_t d = 0; d < action_axes_.size(); ++d) {
    idx += static_cast<std::size_t>(NearestNode(action_axes_[d], action[d])) * action_strides_[d];
  }
  return idx;
}

std::size_t StateActionGrid::CoordsToCell(const Eigen::VectorXd& state,
                                          const Eigen::VectorXd& action) const {
  if (state.size() != state_dim() || action.size() != action_dim()) {
    throw std::invalid_argument("coordinate dimension mismatch");
  }
  std::span<const double> s{state.data(), static_cast<std::size_t>(state.size())};
  std::span<const double> a{action.data(), static_cast<std::size_t>(action.size())};
  if (!StateInBounds(s) || !ActionInBounds(a)) {
    throw std::out_of_range("point outside grid bounds");
  }
  return CellIndex(NearestStateIndex(s), NearestActionIndex(a));
}

bool StateActionGrid::StateInBounds(std::span<const double> state) const {
  for (std::size_t d = 0; d < state_axes_.size(); ++d) {
    if (!OnAxis(state_axes_[d], state[d])) return false;
  }
  return true;
}

bool StateActionGrid::ActionInBounds(std::span<const double> action) const {
  for (std::size_t d = 0; d < action_axes_.size(); ++d) {
    if (!OnAxis(action_axes_[d], action[d])) return false;
  }
  return true;
}

namespace {

StateStencil AxisStencil(const std::vector<GridAxis>& axes,
                         const std::vector<std::size_t>& strides,
                         std::span<const double> point, Interpolation mode) {
  StateStencil st;
  for (std::size_t d = 0; d < axes.size(); ++d) {
    if (!OnAxis(axes[d], point[d])) return st;
  }
  st.inside = true;
  if (mode == Interpolation::kNearest) {
    std::size_t idx = 0;
    for (std::size_t d = 0; d < axes.size(); ++d) {
      idx += static_cast<std::size_t>(NearestNode(axes[d], point[d])) * strides[d];
    }
    st.size = 1;
    st.nodes[0] = idx;
    st.weights[0] = 1.0;
    return st;
  }
  const std::size_t dims = axes.size();
  std::array<std::size_t, 3> base{};
  std::array<double, 3> frac{};
  std::array<bool, 3> flat{};
  for (std::size_t d = 0; d < dims; ++d) {
    const GridAxis& ax = axes[d];
    if (ax.count <= 1) {
      flat[d] = true;
      continue;
    }
    double t = (point[d] - ax.lo) / (ax.hi - ax.lo) * (ax.count - 1);
    // Snap round-off so on-grid queries hit a node with weight exactly 1.
    const double r = std::round(t);
    if (std::abs(t - r) < 1e-9) t = r;
    long i0 = static_cast<long>(std::floor(t));
    if (i0 < 0) i0 = 0;
    if (i0 > ax.count - 2) i0 = ax.count - 2;
    double f = t - static_cast<double>(i0);
    if (f < 0.0) f = 0.0;
    if (f > 1.0) f = 1.0;
    base[d] = static_cast<std::size_t>(i0);
    frac[d] = f;
  }
  const int corners = 1 << dims;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t idx = 0;
    bool skip = false;
    for (std::size_t d = 0; d < dims; ++d) {
      const int bit = (c >> d) & 1;
      if (bit && flat[d]) {
        skip = true;
        break;
      }
      w *= bit ? frac[d] : 1.0 - frac[d];
      idx += (base[d] + bit) * strides[d];
    }
    if (skip || w == 0.0) continue;
    st.nodes[st.size] = idx;
    st.weights[st.size] = w;
    ++st.size;
  }
  return st;
}

}  // namespace

StateStencil StateActionGrid::MakeStateStencil(std::span<const double> state,
                                               Interpolation mode) const {
  return AxisStencil(state_axes_, state_strides_, state, mode);
}

StateStencil StateActionGrid::MakeActionStencil(std::span<const double> action,
                                                Interpolation mode) const {
  if (action_axes_.empty()) {
    StateStencil st;
    st.inside = true;
    st.size = 1;
    st.nodes[0] = 0;
    st.weights[0] = 1.0;
    return st;
  }
  return AxisStencil(action_axes_, action_strides_, action, mode);
}

double StateActionGrid::StateVolume() const {
  double v = 1.0;
  for (const GridAxis& ax : state_axes_) {
    if (ax.count > 1) v *= ax.hi - ax.lo;
  }
  return v;
}

bool StateActionGrid::SameShape(const StateActionGrid& other) const {
  auto same = [](const std::vector<GridAxis>& x, const std::vector<GridAxis>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].lo != y[i].lo || x[i].hi != y[i].hi || x[i].count != y[i].count) return false;
    }
    return true;
  };
  return same(state_axes_, other.state_axes_) && same(action_axes_, other.action_axes_);
}

}  // namespace ldm
