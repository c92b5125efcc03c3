#include "ldm/analysis/bounds.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ldm/solver/solver.h"

namespace ldm {

namespace {

// JSON has no infinities; encode them as strings.
nlohmann::json Num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

}  // namespace

BoundAudit BoundAudit::Make(std::string name, double lhs, double rhs, nlohmann::json inputs) {
  BoundAudit a;
  a.name = std::move(name);
  a.lhs = lhs;
  a.rhs = rhs;
  a.inputs = std::move(inputs);
  a.satisfied = lhs <= rhs + kSlack;
  return a;
}

BoundAudit BoundAudit::NotApplicable(std::string name, double lhs, nlohmann::json inputs,
                                     std::string note) {
  BoundAudit a;
  a.name = std::move(name);
  a.lhs = lhs;
  a.rhs = std::numeric_limits<double>::quiet_NaN();
  a.inputs = std::move(inputs);
  a.applicable = false;
  a.satisfied = false;
  a.note = std::move(note);
  return a;
}

nlohmann::json BoundAudit::ToJson() const {
  nlohmann::json in = nlohmann::json::object();
  for (const auto& [k, v] : inputs.items()) {
    in[k] = v.is_number_float() ? Num(v.get<double>()) : v;
  }
  return {{"name", name},   {"lhs", Num(lhs)},         {"rhs", Num(rhs)},
          {"margin", Num(margin())}, {"applicable", applicable}, {"satisfied", satisfied},
          {"note", note},   {"inputs", in}};
}

double PNorm(const std::vector<double>& p_mass, const std::vector<double>& g) {
  if (p_mass.size() != g.size()) throw std::invalid_argument("P-norm size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (p_mass[i] > 0.0) s += p_mass[i] * std::abs(g[i]);
  }
  return s;
}

double SupNorm(const std::vector<double>& g) {
  double s = 0.0;
  for (double x : g) s = std::max(s, std::abs(x));
  return s;
}

std::vector<double> ProbabilityMasses(const ScalarField& density) {
  if (density.role() != FieldRole::kDensity) throw std::invalid_argument("need a density field");
  std::vector<double> p = density.values();
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("density is zero everywhere");
  for (double& x : p) x /= total;
  return p;
}

ScalarField TabulateEvaluator(const Evaluator& g, const ScalarField& energy) {
  const StateActionGrid& grid = energy.grid();
  std::vector<double> v(grid.num_cells());
  Eigen::VectorXd s(grid.state_dim()), a(grid.action_dim());
  double top = energy.sentinel();
  for (std::size_t st = 0; st < grid.num_states(); ++st) {
    grid.StateNodeInto(st, std::span<double>(s.data(), s.size()));
    for (std::size_t ac = 0; ac < grid.num_actions(); ++ac) {
      grid.ActionNodeInto(ac, std::span<double>(a.data(), a.size()));
      const double x = g(std::span<const double>(s.data(), s.size()),
                         std::span<const double>(a.data(), a.size()));
      if (!std::isfinite(x)) throw std::runtime_error("iterate is not finite at a grid node");
      v[grid.CellIndex(st, ac)] = x;
      top = std::max(top, x);
    }
  }
  return ScalarField(energy.grid_ptr(), std::move(v), FieldRole::kLdm, top);
}

FqiMeasurement MeasureFittedRun(const FittedLdmRun& run, const ScalarField& density,
                                const ScalarField& g_star, const ScalarField& energy,
                                const DynamicalSystem& system, double gamma, Interpolation mode,
                                int jobs) {
  if (!density.SameGrid(energy) || !g_star.SameGrid(energy)) {
    throw std::invalid_argument("density, G* and E must share a grid");
  }
  if (run.iterates.empty()) throw std::invalid_argument("fitted run has no iterates");
  const std::vector<double> p = ProbabilityMasses(density);
  const std::size_t cells = p.size();
  FqiMeasurement m;
  m.K = static_cast<int>(run.iterates.size()) - 1;
  ScalarField prev = TabulateEvaluator(run.iterates.front(), energy);
  for (int t = 0; t < m.K; ++t) {
    ScalarField next = TabulateEvaluator(run.iterates[t + 1], energy);
    const ScalarField backed = LdmBackup(prev, energy, system, gamma, mode, jobs);
    std::vector<double> diff(cells);
    for (std::size_t c = 0; c < cells; ++c) diff[c] = next[c] - backed[c];
    const double err = PNorm(p, diff);
    m.epsilon_ls_per_iteration.push_back(err);
    m.epsilon_ls = std::max(m.epsilon_ls, err);
    prev = std::move(next);
  }
  std::vector<double> d(cells), de(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    d[c] = prev[c] - g_star[c];
    de[c] = energy[c] - g_star[c];
  }
  m.lhs = PNorm(p, d);
  m.sup_term = SupNorm(de);
  m.p_term = PNorm(p, de);
  return m;
}

BoundAudit AuditFqiBound(double lhs, double R, double epsilon_ls, double gamma, int K,
                         double sup_term) {
  if (!(gamma < 1.0)) {
    throw std::invalid_argument(
        "the discounted fitted-iteration bound needs gamma < 1; use the K_fin form for gamma = 1");
  }
  const double rhs = R * epsilon_ls / (1.0 - gamma) + std::pow(gamma, K) * sup_term;
  return BoundAudit::Make("fqi_discounted", lhs, rhs,
                          {{"R", R}, {"epsilon_ls", epsilon_ls}, {"gamma", gamma}, {"K", K},
                           {"sup_norm_E_minus_Gstar", sup_term}});
}

BoundAudit AuditFqiOneStepBound(double lhs, double r, double epsilon_ls, double gamma, int K,
                                double p_term) {
  nlohmann::json in = {{"r", r}, {"epsilon_ls", epsilon_ls}, {"gamma", gamma}, {"K", K},
                       {"p_norm_E_minus_Gstar", p_term}};
  if (!(r * gamma < 1.0)) {
    return BoundAudit::NotApplicable("fqi_one_step", lhs, in, "requires gamma < 1/r");
  }
  const double rg = r * gamma;
  return BoundAudit::Make("fqi_one_step", lhs,
                          epsilon_ls / (1.0 - rg) + std::pow(rg, K) * p_term, in);
}

BoundAudit AuditFqiFiniteHorizonBound(double lhs, double R, int K_fin, double epsilon_ls,
                                      double epsilon_fin) {
  return BoundAudit::Make("fqi_finite_horizon", lhs, R * K_fin * epsilon_ls + epsilon_fin,
                          {{"R", R}, {"K_fin", K_fin}, {"epsilon_ls", epsilon_ls},
                           {"epsilon_fin", epsilon_fin}});
}

double RolloutLogDensityBound(const RolloutGuaranteeInputs& in, int t) {
  if (!(in.c > 0.0 && in.c <= 1.0)) throw std::invalid_argument("c must lie in (0, 1]");
  const double ep = std::exp(in.epsilon_p);
  if (in.gamma >= 1.0) {
    if (!in.K_fin || !in.epsilon_fin) {
      throw std::invalid_argument("gamma = 1 needs K_fin and epsilon_fin");
    }
    return std::log(in.c) - (in.R * *in.K_fin * in.epsilon_ls + *in.epsilon_fin) * ep / in.c -
           in.epsilon_p;
  }
  const double inv = std::pow(in.gamma, -t);
  return inv * std::log(in.c) - inv * in.R * in.epsilon_ls * ep / (in.c * (1.0 - in.gamma)) -
         in.epsilon_p;
}

std::vector<BoundAudit> AuditRolloutGuarantee(const std::vector<double>& log_density,
                                              const RolloutGuaranteeInputs& in) {
  nlohmann::json base = {{"c", in.c}, {"gamma", in.gamma}, {"R", in.R},
                         {"epsilon_ls", in.epsilon_ls}, {"epsilon_p", in.epsilon_p}};
  if (in.K_fin) base["K_fin"] = *in.K_fin;
  if (in.epsilon_fin) base["epsilon_fin"] = *in.epsilon_fin;
  std::vector<BoundAudit> out;
  for (std::size_t t = 0; t < log_density.size(); ++t) {
    nlohmann::json inputs = base;
    inputs["t"] = t;
    out.push_back(BoundAudit::Make("rollout_density_step", -log_density[t],
                                   -RolloutLogDensityBound(in, static_cast<int>(t)), inputs));
  }
  return out;
}

double RewardBoundMinC(const RewardBoundInputs& in, int T) {
  const double num = (1.0 - in.gamma) + in.R * in.epsilon_ls * std::exp(in.epsilon_p);
  const double den = (1.0 - std::pow(in.gamma, T - 1) *
                                (in.epsilon_p + 2.0 * std::log(in.epsilon_r))) *
                     (1.0 - in.gamma);
  if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
  return num / den;
}

BoundAudit AuditRewardBound(const std::vector<double>& planned,
                            const std::vector<double>& realized, const RewardBoundInputs& in,
                            const std::vector<double>& densities) {
  if (planned.size() != realized.size()) throw std::invalid_argument("reward sequences differ in length");
  if (!(in.gamma > 0.0 && in.gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (!(in.c > 0.0 && in.c <= 1.0)) throw std::invalid_argument("c must lie in (0, 1]");
  const int T = static_cast<int>(planned.size());
  double diff = 0.0;
  double g = 1.0;
  for (int t = 0; t < T; ++t) {
    diff += g * (planned[t] - realized[t]);
    g *= in.gamma;
  }
  const double lhs = std::abs(diff);
  const double min_c = RewardBoundMinC(in, T);
  nlohmann::json inputs = {{"c", in.c}, {"gamma", in.gamma}, {"T", T}, {"R", in.R},
                           {"epsilon_ls", in.epsilon_ls}, {"epsilon_p", in.epsilon_p},
                           {"epsilon_r", in.epsilon_r}, {"min_c", min_c}};
  if (!densities.empty()) {
    // 1/sqrt(x) <= 1 - log x holds only for x = P / eps_r^2 in [0.08104, 1].
    bool in_domain = in.epsilon_r > 0.0;
    for (double p : densities) {
      const double x = p / (in.epsilon_r * in.epsilon_r);
      in_domain = in_domain && x >= 0.08104 && x <= 1.0;
    }
    inputs["densities_in_proof_range"] = in_domain;
  }
  if (in.c < min_c) {
    return BoundAudit::NotApplicable("reward_gap", lhs, inputs, "c below the feasibility threshold");
  }
  double rhs = 0.0;
  if (T > 0) {
    const double lead = 1.0 + in.epsilon_p + 2.0 * std::log(in.epsilon_r);
    rhs = lead * (1.0 - std::pow(in.gamma, T)) / (1.0 - in.gamma) +
          T * (std::log(1.0 / in.c) +
               in.R * in.epsilon_ls * std::exp(in.epsilon_p) / (in.c * (1.0 - in.gamma)));
  }
  return BoundAudit::Make("reward_gap", lhs, rhs, inputs);
}

}  // namespace ldm
