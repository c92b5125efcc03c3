#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ldm/core/field.h"
#include "ldm/solver/fitted.h"
#include "ldm/systems/dynamical_system.h"

namespace ldm {

/// A measured quantity against a theoretical upper bound.
struct BoundAudit {
  std::string name;
  double lhs{0.0};
  double rhs{0.0};
  nlohmann::json inputs;
  /// False when the bound's precondition fails; such audits never count as
  /// satisfied.
  bool applicable{true};
  bool satisfied{false};
  std::string note;

  static constexpr double kSlack = 1e-9;
  static BoundAudit Make(std::string name, double lhs, double rhs, nlohmann::json inputs);
  static BoundAudit NotApplicable(std::string name, double lhs, nlohmann::json inputs,
                                  std::string note);
  double margin() const { return rhs - lhs; }
  nlohmann::json ToJson() const;
};

/// sum_c p[c] |g[c]|.
double PNorm(const std::vector<double>& p_mass, const std::vector<double>& g);
double SupNorm(const std::vector<double>& g);
/// P / sum(P) over the cells of a density field.
std::vector<double> ProbabilityMasses(const ScalarField& density);

/// Everything the fitted-iteration bounds need, measured on a grid.
struct FqiMeasurement {
  /// ||G_K - G*||_P.
  double lhs{0.0};
  /// max_t ||G_{t+1} - T G_t||_P with the exact backup T on the grid.
  double epsilon_ls{0.0};
  std::vector<double> epsilon_ls_per_iteration;
  /// ||E - G*||_inf and ||E - G*||_P.
  double sup_term{0.0};
  double p_term{0.0};
  int K{0};
};

/// Tabulates every iterate of a fitted run at the grid nodes and measures
/// it against the grid backup operator (the one whose fixed point the
/// solver returns): eps_ls uses LdmBackup on the tabulated iterate, and
/// `g_star` should be SolveMaximalLdm's result at the same gamma.
FqiMeasurement MeasureFittedRun(const FittedLdmRun& run, const ScalarField& density,
                                const ScalarField& g_star, const ScalarField& energy,
                                const DynamicalSystem& system, double gamma,
                                Interpolation mode = Interpolation::kMultilinear, int jobs = 1);

/// The iterate's values at every cell node, as an LDM-role field whose
/// sentinel is at least the energy's.
ScalarField TabulateEvaluator(const Evaluator& g, const ScalarField& energy);

/// ||G_K - G*||_P <= R eps_ls / (1 - gamma) + gamma^K ||E - G*||_inf.
/// Throws std::invalid_argument for gamma >= 1 (use the K_fin form).
BoundAudit AuditFqiBound(double lhs, double R, double epsilon_ls, double gamma, int K,
                         double sup_term);

/// ||G_K - G*||_P <= eps_ls / (1 - r gamma) + (r gamma)^K ||E - G*||_P,
/// applicable only for gamma < 1 / r.
BoundAudit AuditFqiOneStepBound(double lhs, double r, double epsilon_ls, double gamma, int K,
                                double p_term);

/// Undiscounted form: ||G_K - G*||_P <= R K_fin eps_ls + eps_fin.
BoundAudit AuditFqiFiniteHorizonBound(double lhs, double R, int K_fin, double epsilon_ls,
                                      double epsilon_fin);

struct RolloutGuaranteeInputs {
  double c{0.0};
  double gamma{1.0};
  double R{1.0};
  double epsilon_ls{0.0};
  double epsilon_p{0.0};
  /// Needed when gamma == 1.
  std::optional<int> K_fin;
  std::optional<double> epsilon_fin;
};

/// Lower bound on log P(s_t, a_t) guaranteed t steps after an action with
/// G <= -log c:
///   gamma < 1: gamma^-t log c - gamma^-t R eps_ls e^eps_p / (c (1 - gamma)) - eps_p
///   gamma = 1: log c - (R K_fin eps_ls + eps_fin) e^eps_p / c - eps_p
double RolloutLogDensityBound(const RolloutGuaranteeInputs& in, int t);

/// One audit per step: lhs = -log P achieved at step t, rhs = minus the
/// bound. `log_density[t]` should be the best log P known to be reachable at
/// step t (the rollout's own value is a valid witness).
std::vector<BoundAudit> AuditRolloutGuarantee(const std::vector<double>& log_density,
                                              const RolloutGuaranteeInputs& in);

struct RewardBoundInputs {
  double c{0.0};
  double gamma{0.9};
  double R{1.0};
  double epsilon_ls{0.0};
  double epsilon_p{0.0};
  double epsilon_r{0.0};
};

/// Smallest c for which the planned-vs-realized reward bound is claimed,
/// or +inf when its denominator is not positive.
double RewardBoundMinC(const RewardBoundInputs& in, int T);

/// lhs = |sum_t gamma^t (planned_t - realized_t)| over T = planned.size()
/// steps; rhs = (1 + eps_p + 2 log eps_r)(1 - gamma^T)/(1 - gamma)
///            + T (log(1/c) + R eps_ls e^eps_p / (c (1 - gamma))).
/// Marked not applicable when c is below RewardBoundMinC. When per-step
/// densities are given, inputs record whether every P(s_t, a_t) / eps_r^2
/// lies in [0.08104, 1], the range where 1/sqrt(x) <= 1 - log x holds.
BoundAudit AuditRewardBound(const std::vector<double>& planned,
                            const std::vector<double>& realized, const RewardBoundInputs& in,
                            const std::vector<double>& densities = {});

}  // namespace ldm
