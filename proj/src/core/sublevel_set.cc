#include "ldm/core/sublevel_set.h"

#include <stdexcept>

namespace ldm {

SublevelSet::SublevelSet(const ScalarField& field, double threshold)
    : field_(&field), threshold_(threshold), mask_(field.values().size(), false) {
  if (field.role() != FieldRole::kEnergy && field.role() != FieldRole::kLdm) {
    throw std::invalid_argument("sublevel sets need an energy or ldm field");
  }
  const std::vector<double>& v = field.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] <= threshold) {
      members_.push_back(i);
      mask_[i] = true;
    }
  }
}

}  // namespace ldm
