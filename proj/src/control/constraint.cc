#include "ldm/control/constraint.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ldm {

std::string ToString(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::kLdm: return "ldm";
    case ConstraintKind::kDensity: return "density";
    case ConstraintKind::kNone: return "none";
  }
  return "unknown";
}

ConstraintKind ConstraintKindFromString(const std::string& name) {
  if (name == "ldm") return ConstraintKind::kLdm;
  if (name == "density") return ConstraintKind::kDensity;
  if (name == "none") return ConstraintKind::kNone;
  throw std::invalid_argument("unknown constraint kind '" + name + "' (expected ldm, density or none)");
}

ConstraintSpec ConstraintSpec::None() { return ConstraintSpec{}; }

ConstraintSpec ConstraintSpec::FromField(ConstraintKind kind, const ScalarField& field,
                                         double threshold, Interpolation mode) {
  if (kind == ConstraintKind::kLdm && field.role() != FieldRole::kLdm) {
    throw std::invalid_argument("LDM constraint needs an ldm field, got " + ToString(field.role()));
  }
  if (kind == ConstraintKind::kDensity && field.role() != FieldRole::kEnergy) {
    throw std::invalid_argument("density constraint needs an energy field, got " +
                                ToString(field.role()));
  }
  ConstraintSpec c;
  c.kind = kind;
  if (kind != ConstraintKind::kNone) c.value = FieldEvaluator(field, mode);
  c.threshold = threshold;
  return c;
}

double ConstraintSpec::Value(std::span<const double> state, std::span<const double> action) const {
  if (kind == ConstraintKind::kNone || !value) return std::numeric_limits<double>::quiet_NaN();
  return value(state, action);
}

bool ConstraintSpec::Satisfied(std::span<const double> state,
                               std::span<const double> action) const {
  if (kind == ConstraintKind::kNone) return true;
  return value(state, action) <= threshold;
}

nlohmann::json ConstraintSpec::ToJson() const {
  nlohmann::json j = {{"kind", ToString(kind)}};
  if (kind != ConstraintKind::kNone) {
    j["threshold"] = threshold;
    j["c"] = std::exp(-threshold);
  }
  if (percentile) j["percentile"] = *percentile;
  return j;
}

double PercentileThreshold(std::vector<double> values, double pct) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty set");
  if (!(pct >= 0.0 && pct <= 100.0)) throw std::invalid_argument("percentile must lie in [0, 100]");
  std::sort(values.begin(), values.end());
  const double pos = pct / 100.0 * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return values[lo];
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<double> DatasetConstraintValues(const Evaluator& value,
                                            const TransitionDataset& dataset) {
  std::vector<double> out;
  out.reserve(dataset.size());
  for (const Transition& t : dataset.records()) {
    out.push_back(value(std::span<const double>(t.state.data(), t.state.size()),
                        std::span<const double>(t.action.data(), t.action.size())));
  }
  return out;
}

ConstraintSpec ConstraintFromPercentile(ConstraintKind kind, Evaluator value,
                                        const TransitionDataset& dataset, double pct) {
  ConstraintSpec c;
  c.kind = kind;
  c.percentile = pct;
  if (kind == ConstraintKind::kNone) return c;
  c.threshold = PercentileThreshold(DatasetConstraintValues(value, dataset), pct);
  c.value = std::move(value);
  return c;
}

}  // namespace ldm
