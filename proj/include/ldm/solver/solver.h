#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "ldm/core/field.h"
#include "ldm/core/grid.h"
#include "ldm/systems/dynamical_system.h"

namespace ldm {

struct SolverConfig {
  double gamma{1.0};
  double tolerance{1e-9};
  int max_sweeps{500};
  Interpolation interpolation{Interpolation::kMultilinear};
  bool record_history{true};
  /// Worker threads; results do not depend on it.
  int jobs{1};

  /// Throws std::invalid_argument describing the first bad field.
  void Validate() const;
  nlohmann::json ToJson() const;
  static SolverConfig FromJson(const nlohmann::json& j);
};

std::string ToString(Interpolation mode);
Interpolation InterpolationFromString(const std::string& name);

struct SolveReport {
  int sweeps{0};
  double residual{0.0};
  std::vector<double> residuals;
  bool monotone{true};
  bool converged{false};
  double wall_seconds{0.0};
  /// Cells recomputed per sweep (cells whose successor stencil saw a change).
  std::vector<std::size_t> active_cells;

  nlohmann::json ToJson() const;
};

class SolverNonConvergence : public std::runtime_error {
 public:
  SolverNonConvergence(const std::string& what, std::vector<double> residuals)
      : std::runtime_error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const { return residuals_; }

 private:
  std::vector<double> residuals_;
};

struct SolveResult {
  ScalarField ldm;
  SolveReport report;
};

/// One Jacobi sweep of TG = max{E, gamma * min_a' G(f(s, a), a')}, with G at
/// the off-grid successor read through the field's interpolation rule.
ScalarField LdmBackup(const ScalarField& G, const ScalarField& E, const DynamicalSystem& system,
                      double gamma, Interpolation mode = Interpolation::kMultilinear,
                      int jobs = 1);

/// G_k = T^k E, without a convergence test.
ScalarField IterateLdm(const ScalarField& E, const DynamicalSystem& system, double gamma,
                       int sweeps, Interpolation mode = Interpolation::kMultilinear,
                       int jobs = 1);

/// Value iteration from G_0 = E until the sup-norm change drops below the
/// tolerance. Throws SolverNonConvergence (carrying the residual history)
/// after max_sweeps.
SolveResult SolveMaximalLdm(const ScalarField& E, const DynamicalSystem& system,
                            const SolverConfig& config);

/// max over cells of |TG - G|.
double FixedPointResidual(const ScalarField& G, const ScalarField& E,
                          const DynamicalSystem& system, double gamma,
                          Interpolation mode = Interpolation::kMultilinear, int jobs = 1);

struct CellViolation {
  std::size_t cell;
  double deficit;
};

struct LdmConditionReport {
  std::size_t condition1_violations{0};
  std::size_t condition2_violations{0};
  double worst_condition1{0.0};
  double worst_condition2{0.0};
  /// First violating cells in index order (capped at kMaxListed each).
  std::vector<CellViolation> condition1_cells;
  std::vector<CellViolation> condition2_cells;
  double slack{0.0};

  static constexpr std::size_t kMaxListed = 1000;
  bool ok() const { return condition1_violations == 0 && condition2_violations == 0; }
  nlohmann::json ToJson() const;
};

/// Condition 1: some a' has G(s, a) >= gamma * G(f(s, a), a') - slack.
/// Condition 2: G >= E - slack. Deficits are reported as positive numbers.
LdmConditionReport VerifyLdmConditions(const ScalarField& G, const ScalarField& E,
                                       const DynamicalSystem& system, double slack,
                                       double gamma = 1.0,
                                       Interpolation mode = Interpolation::kMultilinear,
                                       int jobs = 1);

}  // namespace ldm
