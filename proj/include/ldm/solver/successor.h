#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ldm/core/grid.h"
#include "ldm/systems/dynamical_system.h"

namespace ldm {

/// Interpolation stencils of f(s, a) for every cell of a grid.
///
/// Only a 4-byte anchor node per cell is stored; full stencils are rebuilt
/// on demand. Every stencil node lies in the cube spanned by the anchor and
/// CubeOffsets(), which lets sweeps skip cells whose inputs did not change.
class SuccessorStencils {
 public:
  static constexpr std::uint32_t kOffDomain = 0xffffffffu;

  /// Without anchors only Stencil() may be used.
  SuccessorStencils(const StateActionGrid& grid, const DynamicalSystem& system,
                    Interpolation mode, int jobs = 1, bool with_anchors = true);

  const StateActionGrid& grid() const { return grid_; }
  Interpolation mode() const { return mode_; }
  StateStencil Stencil(std::size_t cell) const;
  std::uint32_t Anchor(std::size_t cell) const { return anchors_[cell]; }
  const std::vector<std::size_t>& CubeOffsets() const { return offsets_; }

  /// True when any node the cell's stencil may touch has `flags` set.
  bool Touches(std::size_t cell, const std::vector<std::uint8_t>& flags) const {
    const std::uint32_t anchor = anchors_[cell];
    if (anchor == kOffDomain) return false;
    for (std::size_t off : offsets_) {
      const std::size_t n = anchor + off;
      if (n < flags.size() && flags[n]) return true;
    }
    return false;
  }

 private:
  const StateActionGrid& grid_;
  const DynamicalSystem& system_;
  Interpolation mode_;
  std::vector<std::uint32_t> anchors_;
  std::vector<std::size_t> offsets_;
  std::vector<double> action_coords_;
};

}  // namespace ldm
