#pragma once

#include <cstddef>
#include <vector>

#include "ldm/core/field.h"

namespace ldm {

/// Cells of an energy or LDM field with value <= threshold. The threshold
/// reads as -log c for a density level c.
class SublevelSet {
 public:
  SublevelSet(const ScalarField& field, double threshold);

  const ScalarField& field() const { return *field_; }
  double threshold() const { return threshold_; }
  const std::vector<std::size_t>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool Contains(std::size_t cell) const { return mask_[cell]; }

 private:
  const ScalarField* field_;
  double threshold_;
  std::vector<std::size_t> members_;
  std::vector<bool> mask_;
};

}  // namespace ldm
