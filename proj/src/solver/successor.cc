#include "ldm/solver/successor.h"

#include <array>
#include <stdexcept>

#include "ldm/core/parallel.h"

namespace ldm {

SuccessorStencils::SuccessorStencils(const StateActionGrid& grid, const DynamicalSystem& system,
                                     Interpolation mode, int jobs, bool with_anchors)
    : grid_(grid), system_(system), mode_(mode) {
  if (system.state_dim() != grid.state_dim() || system.action_dim() != grid.action_dim()) {
    throw std::invalid_argument("system dimensions do not match the grid");
  }
  if (grid.num_states() >= kOffDomain) throw std::invalid_argument("grid has too many states");
  const std::size_t na = grid.num_actions();
  const int da = grid.action_dim();
  action_coords_.resize(na * da);
  for (std::size_t j = 0; j < na; ++j) {
    grid.ActionNodeInto(j, std::span<double>(action_coords_.data() + j * da, da));
  }
  // Strides of the state axes, for the anchor cube.
  const int ds = grid.state_dim();
  std::vector<std::size_t> strides(ds, 1);
  for (int d = ds - 2; d >= 0; --d) strides[d] = strides[d + 1] * grid.state_axes()[d + 1].count;
  offsets_.push_back(0);
  for (int d = 0; d < ds; ++d) {
    if (grid.state_axes()[d].count <= 1) continue;
    const std::size_t n = offsets_.size();
    for (std::size_t k = 0; k < n; ++k) offsets_.push_back(offsets_[k] + strides[d]);
  }
  if (!with_anchors) return;
  anchors_.resize(grid.num_cells());
  ParallelFor(grid.num_cells(), jobs, [&](std::size_t begin, std::size_t end, int) {
    for (std::size_t c = begin; c < end; ++c) {
      const StateStencil st = Stencil(c);
      anchors_[c] = st.inside ? static_cast<std::uint32_t>(st.nodes[0]) : kOffDomain;
    }
  });
}

StateStencil SuccessorStencils::Stencil(std::size_t cell) const {
  const int ds = grid_.state_dim();
  const int da = grid_.action_dim();
  std::array<double, 3> s{};
  std::array<double, 3> next{};
  grid_.StateNodeInto(grid_.StateOfCell(cell), std::span<double>(s.data(), ds));
  const double* a = action_coords_.data() + grid_.ActionOfCell(cell) * da;
  system_.Step(std::span<const double>(s.data(), ds), std::span<const double>(a, da),
               std::span<double>(next.data(), ds));
  return grid_.MakeStateStencil(std::span<const double>(next.data(), ds), mode_);
}

}  // namespace ldm
