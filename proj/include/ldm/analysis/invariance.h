#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "ldm/core/sublevel_set.h"
#include "ldm/solver/solver.h"
#include "ldm/systems/dynamical_system.h"

namespace ldm {

struct InvarianceReport {
  double threshold{0.0};
  double slack{0.0};
  std::size_t members{0};
  std::size_t violations{0};
  /// Largest amount by which the best successor exceeds the threshold.
  double worst_deficit{0.0};
  /// First violating cells in index order (at most kMaxListed).
  std::vector<CellViolation> violating_cells;

  static constexpr std::size_t kMaxListed = 1000;
  bool invariant() const { return violations == 0; }
  nlohmann::json ToJson() const;
};

/// For every member (s, a) checks that some grid action a' keeps
/// (f(s, a), a') inside the set, i.e. min_a' field(f(s, a), a') <=
/// threshold + slack with the field read through its lookup rule.
/// `count` thresholds evenly spaced from the field's minimum to its largest
/// value below the sentinel (inclusive).
std::vector<double> SpanningThresholds(const ScalarField& field, int count);

InvarianceReport VerifyInvariance(const SublevelSet& set, const DynamicalSystem& system,
                                  double slack = 0.0,
                                  Interpolation mode = Interpolation::kMultilinear, int jobs = 1);

}  // namespace ldm
