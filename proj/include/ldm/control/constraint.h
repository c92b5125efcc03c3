#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ldm/core/dataset.h"
#include "ldm/core/field.h"
#include "ldm/solver/fitted.h"

namespace ldm {

enum class ConstraintKind { kLdm, kDensity, kNone };

std::string ToString(ConstraintKind kind);
ConstraintKind ConstraintKindFromString(const std::string& name);

/// value(s, a) <= threshold, where value is an LDM (kLdm) or the energy
/// -log P (kDensity). The threshold reads as -log c. kNone accepts
/// everything.
struct ConstraintSpec {
  ConstraintKind kind{ConstraintKind::kNone};
  Evaluator value;
  double threshold{0.0};
  /// Set when the threshold came from PercentileThreshold.
  std::optional<double> percentile;

  static ConstraintSpec None();
  static ConstraintSpec FromField(ConstraintKind kind, const ScalarField& field, double threshold,
                                  Interpolation mode = Interpolation::kMultilinear);

  /// NaN for kNone.
  double Value(std::span<const double> state, std::span<const double> action) const;
  bool Satisfied(std::span<const double> state, std::span<const double> action) const;
  nlohmann::json ToJson() const;
};

/// Linear-interpolation percentile (pct in [0, 100]) of the values.
/// Throws std::invalid_argument for an empty input or pct out of range.
double PercentileThreshold(std::vector<double> values, double pct);

/// The constraint function evaluated at every dataset record.
std::vector<double> DatasetConstraintValues(const Evaluator& value,
                                            const TransitionDataset& dataset);

/// Threshold set to the pct-th percentile of the value over the dataset.
/// kNone ignores the dataset and keeps the percentile for bookkeeping.
ConstraintSpec ConstraintFromPercentile(ConstraintKind kind, Evaluator value,
                                        const TransitionDataset& dataset, double pct);

}  // namespace ldm
