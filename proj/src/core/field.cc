#include "ldm/core/field.h"

#include "ldm/core/stencil_ops.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ldm {

std::string ToString(FieldRole role) {
  switch (role) {
    case FieldRole::kDensity: return "density";
    case FieldRole::kEnergy: return "energy";
    case FieldRole::kLdm: return "ldm";
    case FieldRole::kGeneric: return "generic";
  }
  return "generic";
}

FieldRole FieldRoleFromString(const std::string& name) {
  if (name == "density") return FieldRole::kDensity;
  if (name == "energy") return FieldRole::kEnergy;
  if (name == "ldm") return FieldRole::kLdm;
  if (name == "generic") return FieldRole::kGeneric;
  throw std::invalid_argument("unknown field role '" + name + "'");
}

ScalarField::ScalarField(std::shared_ptr<const StateActionGrid> grid,
                         std::vector<double> values, FieldRole role, double sentinel)
    : grid_(std::move(grid)), values_(std::move(values)), role_(role), sentinel_(sentinel) {
  if (!grid_) throw std::invalid_argument("field needs a grid");
  if (values_.size() != grid_->num_cells()) {
    throw std::invalid_argument("field has " + std::to_string(values_.size()) +
                                " values for " + std::to_string(grid_->num_cells()) + " cells");
  }
  if (!std::isfinite(sentinel_)) throw std::invalid_argument("sentinel must be finite");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (std::isnan(v)) throw std::invalid_argument("NaN in field at cell " + std::to_string(i));
    if (role_ == FieldRole::kDensity && v < 0.0) {
      throw std::invalid_argument("negative density at cell " + std::to_string(i));
    }
    if ((role_ == FieldRole::kEnergy || role_ == FieldRole::kLdm) && v > sentinel_) {
      throw std::invalid_argument("value above sentinel at cell " + std::to_string(i));
    }
  }
}

double ScalarField::Lookup(std::span<const double> state, std::span<const double> action,
                           Interpolation mode) const {
  const StateStencil ss = grid_->MakeStateStencil(state, mode);
  if (!ss.inside) return OffDomainValue();
  const StateStencil as = grid_->MakeActionStencil(action, mode);
  if (!as.inside) return OffDomainValue();
  const std::size_t na = grid_->num_actions();
  // Interpolate over actions first, then over states, matching StencilRow.
  double v = 0.0;
  for (int i = 0; i < ss.size; ++i) {
    double row = 0.0;
    for (int j = 0; j < as.size; ++j) {
      row += as.weights[j] * values_[ss.nodes[i] * na + as.nodes[j]];
    }
    v = i == 0 ? ss.weights[0] * row : v + ss.weights[i] * row;
  }
  return Clip(v);
}

double ScalarField::Lookup(const Eigen::VectorXd& state, const Eigen::VectorXd& action,
                           Interpolation mode) const {
  return Lookup(std::span<const double>(state.data(), static_cast<std::size_t>(state.size())),
                std::span<const double>(action.data(), static_cast<std::size_t>(action.size())),
                mode);
}

double ScalarField::LookupAtAction(const StateStencil& stencil,
                                   std::size_t action_index) const {
  if (!stencil.inside) return OffDomainValue();
  const std::size_t na = grid_->num_actions();
  double v = stencil.weights[0] * values_[stencil.nodes[0] * na + action_index];
  for (int i = 1; i < stencil.size; ++i) {
    v += stencil.weights[i] * values_[stencil.nodes[i] * na + action_index];
  }
  return Clip(v);
}

ScalarField::ActionMin ScalarField::MinOverActions(const StateStencil& stencil) const {
  if (!stencil.inside) return {OffDomainValue(), 0};
  const std::size_t na = grid_->num_actions();
  std::vector<double> row(na);
  StencilRow(stencil, values_.data(), na, row.data());
  std::size_t arg = 0;
  const double best = RowMin(row.data(), na, &arg);
  return {Clip(best), arg};
}

ScalarField::ActionMin ScalarField::MaxOverActions(const StateStencil& stencil) const {
  if (!stencil.inside) return {OffDomainValue(), 0};
  const std::size_t na = grid_->num_actions();
  std::vector<double> row(na);
  StencilRow(stencil, values_.data(), na, row.data());
  std::size_t arg = 0;
  const double best = RowMax(row.data(), na, &arg);
  return {Clip(best), arg};
}

double ScalarField::MinValue() const {
  return *std::min_element(values_.begin(), values_.end());
}

double ScalarField::MaxValue() const {
  return *std::max_element(values_.begin(), values_.end());
}

bool ScalarField::SameGrid(const ScalarField& other) const {
  return grid_ == other.grid_ || grid_->SameShape(*other.grid_);
}

}  // namespace ldm
