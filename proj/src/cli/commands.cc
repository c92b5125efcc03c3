#include "ldm/cli/commands.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>

#include "ldm/analysis/bounds.h"
#include "ldm/analysis/clf.h"
#include "ldm/analysis/invariance.h"
#include "ldm/analysis/recoverability.h"
#include "ldm/control/constraint.h"
#include "ldm/control/mpc.h"
#include "ldm/control/rollout.h"
#include "ldm/control/sweep.h"
#include "ldm/core/field_io.h"
#include "ldm/core/sublevel_set.h"
#include "ldm/systems/chain.h"
#include "ldm/systems/fit_dynamics.h"

namespace ldm {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string OutPath(const CliOptions& o, const std::string& name) {
  return (fs::path(o.out_dir) / name).string();
}

void RequireFile(const std::string& stem) {
  fs::path p(stem);
  if (p.extension() == ".csv" || p.extension() == ".json") p.replace_extension();
  const fs::path csv = fs::path(p).concat(".csv");
  const fs::path js = fs::path(p).concat(".json");
  if (!fs::exists(csv)) throw MissingArtifact("missing artifact: " + csv.string());
  if (!fs::exists(js)) throw MissingArtifact("missing artifact: " + js.string());
}

ScalarField LoadField(const std::string& stem, FieldRole role, const ScalarField& like) {
  RequireFile(stem);
  ScalarField f = ReadField(stem);
  if (f.role() != role) {
    throw ConfigError(stem + ": expected a " + ToString(role) + " field, found " + ToString(f.role()));
  }
  if (!f.SameGrid(like)) throw ConfigError(stem + ": grid does not match the configured grid");
  return ScalarField(like.grid_ptr(), f.values(), f.role(), f.sentinel());
}

ScalarField SolveOrLoadLdm(const RunConfig& config, const Problem& p, const CliOptions& o,
                           std::ostream& log, double gamma) {
  if (config.constraint.contains("field") && gamma == config.solver.gamma) {
    return LoadField(config.constraint["field"], FieldRole::kLdm, *p.energy);
  }
  SolverConfig sc = config.solver;
  sc.gamma = gamma;
  sc.jobs = o.jobs;
  SolveResult r = SolveMaximalLdm(*p.energy, *p.system, sc);
  log << "solved LDM (gamma " << gamma << ") in " << r.report.sweeps << " sweeps\n";
  return std::move(r.ldm);
}

const ScalarField& ConstraintField(ConstraintKind kind, const ScalarField& ldm, const Problem& p) {
  return kind == ConstraintKind::kLdm ? ldm : *p.energy;
}

ConstraintSpec BuildConstraint(const RunConfig& config, const Problem& p, const ScalarField& ldm) {
  const ConstraintKind kind = ConstraintKindFromString(config.constraint["kind"]);
  if (kind == ConstraintKind::kNone) return ConstraintSpec::None();
  const ScalarField& field = ConstraintField(kind, ldm, p);
  if (config.constraint.contains("percentile")) {
    return ConstraintFromPercentile(kind, FieldEvaluator(field), *p.dataset,
                                    config.constraint["percentile"]);
  }
  const double threshold = config.constraint.contains("threshold")
                               ? config.constraint["threshold"].get<double>()
                               : -std::log(config.constraint["c"].get<double>());
  return ConstraintSpec::FromField(kind, field, threshold);
}

std::shared_ptr<const DynamicalSystem> PlanningModel(const RunConfig& config, const Problem& p,
                                                     std::ostream& log) {
  if (config.mpc.dynamics == PlanningDynamics::kTrueSystem) return p.system;
  FittedLinearModel fit = FitLinearDynamics(*p.dataset);
  log << "fitted dynamics model, residual rmse " << fit.residual_rmse << "\n";
  return fit.model;
}

std::vector<Eigen::VectorXd> Starts(const RunConfig& config) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& s : config.rollout["starts"]) {
    const auto v = s.get<std::vector<double>>();
    out.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  return out;
}

std::function<bool(std::span<const double>)> FailureRule(const RunConfig& config, const Problem& p) {
  if (config.is_chain()) return ZeroDensityFailure(p.true_density, p.grid);
  return nullptr;
}

// max |E + log P| over the given points; infinite when P vanishes at one.
double MeasureEpsilonP(const ScalarField& energy, const Evaluator& density,
                       const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& points) {
  double eps = 0.0;
  for (const auto& [s, a] : points) {
    const std::span<const double> ss(s.data(), s.size()), as(a.data(), a.size());
    const double pv = density(ss, as);
    if (!(pv > 0.0)) return std::numeric_limits<double>::infinity();
    eps = std::max(eps, std::abs(energy.Lookup(ss, as) + std::log(pv)));
  }
  return eps;
}

json AuditsJson(const std::vector<BoundAudit>& audits) {
  json a = json::array();
  for (const auto& x : audits) a.push_back(x.ToJson());
  return a;
}

// Counts applicable-but-violated audits.
std::size_t Violations(const std::vector<BoundAudit>& audits) {
  std::size_t n = 0;
  for (const auto& a : audits) n += (a.applicable && !a.satisfied) ? 1 : 0;
  return n;
}

struct RolloutAuditResult {
  RolloutRecord record;
  std::vector<BoundAudit> density_audits;
  std::optional<BoundAudit> reward_audit;
};

// One LDM-constrained rollout plus its density-guarantee and reward-gap
// audits. The LDM here is a tabular solve, so eps_ls = eps_fin = 0.
RolloutAuditResult AuditedRollout(const RunConfig& config, const Problem& p, const ScalarField& ldm,
                                  double gamma, int sweeps, double R,
                                  std::shared_ptr<const DynamicalSystem> model,
                                  const Eigen::VectorXd& start, std::uint64_t seed) {
  ConstraintSpec constraint = BuildConstraint(config, p, ldm);
  if (constraint.kind != ConstraintKind::kLdm) {
    json c = config.constraint;
    c["kind"] = "ldm";
    RunConfig copy = config;
    copy.constraint = c;
    constraint = BuildConstraint(copy, p, ldm);
  }
  MpcConfig mc = config.mpc;
  mc.seed = seed;
  MpcPlanner planner(mc, constraint, model, p.grid);
  RolloutOptions ro;
  ro.n_steps = config.rollout["n_steps"];
  ro.reward = mc.reward;
  ro.density = p.true_density;
  ro.constraint = constraint;
  ro.failure = FailureRule(config, p);
  RolloutAuditResult out;
  out.record = Rollout(*p.system, *p.grid, MpcPolicy(planner), start, ro);
  const auto& steps = out.record.steps;

  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> points;
  std::vector<double> logp;
  for (const auto& s : steps) {
    points.emplace_back(s.state, s.action);
    logp.push_back(std::log(s.density));
  }
  const double eps_p = MeasureEpsilonP(*p.energy, p.true_density, points);
  RolloutGuaranteeInputs in;
  in.c = std::exp(-constraint.threshold);
  in.gamma = gamma;
  in.R = R;
  in.epsilon_ls = 0.0;
  in.epsilon_p = eps_p;
  if (gamma >= 1.0) {
    in.K_fin = sweeps;
    in.epsilon_fin = 0.0;
  }
  const bool premise = !steps.empty() && !steps.front().fallback;
  if (premise && in.c <= 1.0) {
    out.density_audits = AuditRolloutGuarantee(logp, in);
  } else {
    out.density_audits.push_back(BoundAudit::NotApplicable(
        "rollout_density_step", std::numeric_limits<double>::quiet_NaN(),
        {{"c", in.c}, {"gamma", gamma}},
        "the first action did not satisfy the LDM constraint"));
  }

  if (gamma < 1.0 && steps.size() >= 2) {
    std::vector<double> planned, realized, dens;
    Eigen::VectorXd fn(p.system->state_dim()), mn(p.system->state_dim());
    for (std::size_t t = 0; t + 1 < steps.size(); ++t) {
      const auto& s = steps[t];
      const auto& a_next = steps[t + 1].action;
      p.system->Step(std::span<const double>(s.state.data(), s.state.size()),
                     std::span<const double>(s.action.data(), s.action.size()),
                     std::span<double>(fn.data(), fn.size()));
      model->Step(std::span<const double>(s.state.data(), s.state.size()),
                  std::span<const double>(s.action.data(), s.action.size()),
                  std::span<double>(mn.data(), mn.size()));
      const std::span<const double> an(a_next.data(), a_next.size());
      planned.push_back(mc.reward(std::span<const double>(mn.data(), mn.size()), an));
      realized.push_back(mc.reward(std::span<const double>(fn.data(), fn.size()), an));
      dens.push_back(s.density);
    }
    // Smallest eps_r with |r(f) - r(f_hat)| <= eps_r / sqrt(P) over the
    // grid's supported cells; the goal-distance reward is 1-Lipschitz in
    // the state and the action reward ignores it.
    double eps_r = 0.0;
    if (mc.reward.kind == RewardSpec::Kind::kGoalDistance) {
      const StateActionGrid& g = *p.grid;
      for (std::size_t c = 0; c < g.num_cells(); ++c) {
        const double pv = (*p.reference_density)[c];
        if (!(pv > 0.0)) continue;
        auto [s, a] = g.CellToCoords(c);
        eps_r = std::max(eps_r, std::sqrt(pv) * (p.system->Step(s, a) - model->Step(s, a)).norm());
      }
    }
    RewardBoundInputs rin;
    rin.c = in.c;
    rin.gamma = gamma;
    rin.R = R;
    rin.epsilon_ls = 0.0;
    rin.epsilon_p = eps_p;
    rin.epsilon_r = eps_r;
    if (premise && in.c <= 1.0) out.reward_audit = AuditRewardBound(planned, realized, rin, dens);
  }
  return out;
}

void WriteStream(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  fn(f);
}

}  // namespace

int CmdSolve(const RunConfig& config, const CliOptions& o, std::ostream& log) {
  const Problem p = BuildProblem(config);
  const json meta = {{"config", config.ToJson()}};
  WriteField(*p.density, OutPath(o, "density"), meta);
  WriteField(*p.energy, OutPath(o, "energy"), meta);
  if (p.dataset) p.dataset->WriteCsv(OutPath(o, "dataset.csv"));
  SolverConfig sc = config.solver;
  sc.jobs = o.jobs;
  try {
    SolveResult r = SolveMaximalLdm(*p.energy, *p.system, sc);
    WriteField(r.ldm, OutPath(o, "ldm"), meta);
    WriteJson(r.report.ToJson(), OutPath(o, "solve_report.json"));
    log << "converged in " << r.report.sweeps << " sweeps, residual " << r.report.residual
        << ", monotone " << (r.report.monotone ? "yes" : "no") << "\n";
  } catch (const SolverNonConvergence& e) {
    WriteJson({{"converged", false}, {"error", e.what()}, {"residuals", e.residuals()}},
              OutPath(o, "solve_report.json"));
    throw;
  }
  return kExitOk;
}

int CmdVerify(const RunConfig& config, const CliOptions& o, std::ostream& log) {
  const Problem p = BuildProblem(config);
  const std::string ldm_path = config.verify.value("ldm", OutPath(o, "ldm"));
  const std::string energy_path = config.verify.value("energy", OutPath(o, "energy"));
  RequireFile(ldm_path);
  RequireFile(energy_path);
  ScalarField E0 = ReadField(energy_path);
  if (E0.role() != FieldRole::kEnergy) throw ConfigError(energy_path + ": not an energy field");
  if (!E0.SameGrid(*p.energy)) throw ConfigError(energy_path + ": grid does not match the configured grid");
  const ScalarField E(p.grid, E0.values(), E0.role(), E0.sentinel());
  ScalarField G0 = ReadField(ldm_path);
  if (!G0.SameGrid(E)) throw ConfigError(ldm_path + ": grid does not match " + energy_path);
  // Any field may be checked as a candidate LDM.
  const ScalarField G(p.grid, G0.values(), FieldRole::kLdm, std::max(G0.sentinel(), E.sentinel()));
  const double slack = config.verify["slack"];
  const double gamma = config.solver.gamma;
  bool ok = true;
  json report;
  const LdmConditionReport cond = VerifyLdmConditions(G, E, *p.system, slack, gamma,
                                                      config.solver.interpolation, o.jobs);
  report["conditions"] = cond.ToJson();
  ok = ok && cond.ok();
  const std::vector<double> thresholds =
      config.verify.contains("thresholds") ? config.verify["thresholds"].get<std::vector<double>>()
                                           : SpanningThresholds(G, config.verify["count"]);
  json inv = json::array();
  for (double t : thresholds) {
    const InvarianceReport r = VerifyInvariance(SublevelSet(G, t), *p.system, slack,
                                                config.solver.interpolation, o.jobs);
    inv.push_back(r.ToJson());
    ok = ok && r.invariant();
  }
  report["invariance"] = inv;
  if (config.verify.contains("clf")) {
    const json& c = config.verify["clf"];
    const auto s = c["state"].get<std::vector<double>>();
    const auto a = c["action"].get<std::vector<double>>();
    const ClfResult clf = ExtractClf(G, Eigen::Map<const Eigen::VectorXd>(s.data(), 2),
                                     Eigen::Map<const Eigen::VectorXd>(a.data(), 1), c["tolerance"]);
    const ClfReport cr = VerifyClf(clf, *p.system, *p.grid, slack);
    report["clf"] = cr.ToJson();
    WriteField(clf.W, OutPath(o, "clf"));
    ok = ok && cr.ok();
  }
  report["ok"] = ok;
  WriteJson(report, OutPath(o, "verify_report.json"));
  log << "verification " << (ok ? "passed" : "FAILED") << " (" << cond.condition1_violations
      << " condition-1 and " << cond.condition2_violations << " condition-2 violations, "
      << thresholds.size() << " thresholds)\n";
  return ok || !o.strict ? kExitOk : kExitVerification;
}

int CmdMpc(const RunConfig& config, const CliOptions& o, std::ostream& log) {
  const bool needs_data = config.constraint.contains("percentile") ||
                          config.mpc.dynamics == PlanningDynamics::kFittedModel;
  const Problem p = BuildProblem(config, needs_data);
  const ConstraintKind kind = ConstraintKindFromString(config.constraint["kind"]);
  std::optional<ScalarField> ldm;
  if (kind == ConstraintKind::kLdm) ldm = SolveOrLoadLdm(config, p, o, log, config.solver.gamma);
  const ConstraintSpec constraint = BuildConstraint(config, p, ldm ? *ldm : *p.energy);
  const auto model = PlanningModel(config, p, log);
  RolloutOptions ro;
  ro.n_steps = config.rollout["n_steps"];
  ro.reward = config.mpc.reward;
  ro.density = p.true_density;
  ro.constraint = constraint;
  ro.failure = FailureRule(config, p);
  json summaries = json::array();
  const auto starts = Starts(config);
  const int n = std::max<int>(config.rollout["n_rollouts"].get<int>(), static_cast<int>(starts.size()));
  for (int i = 0; i < n; ++i) {
    MpcConfig mc = config.mpc;
    mc.jobs = o.jobs;
    if (i > 0) mc.seed = SubstreamSeed(config.mpc.seed, "rollout-" + std::to_string(i));
    MpcPlanner planner(mc, constraint, model, p.grid);
    const RolloutRecord rec =
        Rollout(*p.system, *p.grid, MpcPolicy(planner), starts[i % starts.size()], ro);
    rec.WriteCsv(OutPath(o, "rollout_" + std::to_string(i) + ".csv"));
    json s = rec.Summary();
    s["index"] = i;
    summaries.push_back(s);
    log << "rollout " << i << ": " << rec.steps.size() << " steps, " << ToString(rec.termination)
        << ", reward " << rec.total_reward() << ", min density " << rec.min_density() << "\n";
  }
  WriteJson({{"constraint", constraint.ToJson()}, {"rollouts", summaries}}, OutPath(o, "rollouts.json"));
  return kExitOk;
}

int CmdSweep(const RunConfig& config, const CliOptions& o, std::ostream& log) {
  const Problem p = BuildProblem(config, true);
  std::vector<ConstraintKind> kinds;
  for (const auto& k : config.sweep["kinds"]) kinds.push_back(ConstraintKindFromString(k));
  SweepTask task;
  task.name = config.system["kind"];
  task.system = p.system;
  task.model = PlanningModel(config, p, log);
  task.grid = p.grid;
  task.density = p.true_density;
  task.energy = FieldEvaluator(*p.energy);
  bool wants_ldm = false;
  for (auto k : kinds) wants_ldm = wants_ldm || k == ConstraintKind::kLdm;
  std::optional<ScalarField> ldm;
  if (wants_ldm) {
    ldm = SolveOrLoadLdm(config, p, o, log, config.solver.gamma);
    task.ldm = FieldEvaluator(*ldm);
  }
  task.dataset = *p.dataset;
  task.mpc = config.mpc;
  task.n_steps = config.sweep["n_steps"];
  task.rollouts_per_seed = config.sweep["rollouts_per_seed"];
  if (config.is_chain()) task.starts = Starts(config);
  task.failure = FailureRule(config, p);
  const SweepTable table =
      ThresholdSweep(task, kinds, config.sweep["percentiles"].get<std::vector<double>>(),
                     config.sweep["seeds"].get<std::vector<std::uint64_t>>(), o.jobs);
  WriteStream(OutPath(o, "sweep_runs.csv"), [&](std::ostream& f) { table.WriteRunsCsv(f); });
  WriteStream(OutPath(o, "sweep_summary.csv"), [&](std::ostream& f) { table.WriteSummaryCsv(f); });
  log << "sweep: " << table.runs.size() << " runs, " << table.summary.size() << " summary rows\n";
  return kExitOk;
}

int CmdAudit(const RunConfig& config, const CliOptions& o, std::ostream& log) {
  const Problem p = BuildProblem(config);
  const json& a = config.audit;
  const std::string method = a["method"];
  const RecoverabilityReport rec = ComputeRecoverability(*p.reference_density, *p.system,
                                                         config.solver.interpolation);
  log << "recoverability R = " << rec.R << ", r = " << rec.r << "\n";
  json runs = json::array();
  std::vector<BoundAudit> all;
  std::map<double, std::pair<ScalarField, int>> gstar;
  for (double gamma : a["gammas"].get<std::vector<double>>()) {
    SolverConfig sc = config.solver;
    sc.gamma = gamma;
    sc.jobs = o.jobs;
    sc.max_sweeps = std::max(sc.max_sweeps, 20000);
    SolveResult r = SolveMaximalLdm(*p.energy, *p.system, sc);
    gstar.emplace(gamma, std::make_pair(std::move(r.ldm), r.report.sweeps));
  }
  for (std::uint64_t seed : a["seeds"].get<std::vector<std::uint64_t>>()) {
    RunConfig dc = config;
    dc.seed = seed;
    dc.n_samples = a["n_samples"];
    const Problem dp = BuildProblem(dc, method != "tabular");
    for (double gamma : a["gammas"].get<std::vector<double>>()) {
      const ScalarField& gs = gstar.at(gamma).first;
      for (int K : a["iterations"].get<std::vector<int>>()) {
        FittedConfig fc;
        fc.iterations = K;
        fc.gamma = gamma;
        fc.ridge = a["ridge"];
        FittedLdmRun run;
        if (method == "tabular") {
          for (int t = 0; t <= K; ++t) {
            run.iterates.push_back(FieldEvaluator(
                IterateLdm(*p.energy, *p.system, gamma, t, config.solver.interpolation, o.jobs),
                Interpolation::kNearest));
          }
        } else if (method == "one-hot") {
          run = FittedLdmIterationOneHot(*dp.dataset, FieldEvaluator(*p.energy), p.grid, fc,
                                         p.energy->sentinel());
        } else {
          run = FittedLdmIteration(*dp.dataset, FieldEvaluator(*p.energy), *p.grid,
                                   std::make_shared<RbfBasis>(*p.grid, a["centers"].get<int>()), fc,
                                   p.energy->sentinel());
        }
        const FqiMeasurement m = MeasureFittedRun(run, *p.reference_density, gs, *p.energy,
                                                  *p.system, gamma, config.solver.interpolation, o.jobs);
        std::vector<BoundAudit> audits;
        if (gamma < 1.0) {
          audits.push_back(AuditFqiBound(m.lhs, rec.R, m.epsilon_ls, gamma, K, m.sup_term));
          audits.push_back(AuditFqiOneStepBound(m.lhs, rec.r, m.epsilon_ls, gamma, K, m.p_term));
        } else if (a.contains("epsilon_fin")) {
          audits.push_back(AuditFqiFiniteHorizonBound(m.lhs, rec.R, K, m.epsilon_ls, a["epsilon_fin"]));
        } else {
          audits.push_back(BoundAudit::NotApplicable("fqi_finite_horizon", m.lhs, {{"K_fin", K}},
                                                     "gamma = 1 needs audit.epsilon_fin"));
        }
        runs.push_back({{"method", method},
                        {"seed", seed},
                        {"gamma", gamma},
                        {"K", K},
                        {"epsilon_ls", m.epsilon_ls},
                        {"epsilon_ls_per_iteration", m.epsilon_ls_per_iteration},
                        {"lhs", m.lhs},
                        {"sup_norm_E_minus_Gstar", m.sup_term},
                        {"p_norm_E_minus_Gstar", m.p_term},
                        {"audits", AuditsJson(audits)}});
        all.insert(all.end(), audits.begin(), audits.end());
        log << method << " seed " << seed << " gamma " << gamma << " K " << K << ": lhs " << m.lhs
            << ", eps_ls " << m.epsilon_ls << "\n";
      }
    }
  }

  json rollouts = json::array();
  const Problem rp = BuildProblem(config, config.constraint.contains("percentile") ||
                                              config.mpc.dynamics == PlanningDynamics::kFittedModel);
  const auto model = PlanningModel(config, rp, log);
  const auto starts = Starts(config);
  for (const auto& [gamma, solved] : gstar) {
    for (std::size_t i = 0; i < starts.size(); ++i) {
      const RolloutAuditResult r =
          AuditedRollout(config, rp, solved.first, gamma, solved.second, rec.R, model, starts[i],
                         SubstreamSeed(config.mpc.seed, "audit-" + std::to_string(i)));
      json entry = {{"gamma", gamma}, {"start", i}, {"rollout", r.record.Summary()},
                    {"density_audits", AuditsJson(r.density_audits)}};
      all.insert(all.end(), r.density_audits.begin(), r.density_audits.end());
      if (r.reward_audit) {
        entry["reward_audit"] = r.reward_audit->ToJson();
        all.push_back(*r.reward_audit);
      }
      rollouts.push_back(entry);
    }
  }
  std::size_t applicable = 0, satisfied = 0;
  for (const auto& x : all) {
    applicable += x.applicable ? 1 : 0;
    satisfied += x.satisfied ? 1 : 0;
  }
  const std::size_t violated = Violations(all);
  WriteJson({{"recoverability", {{"R", rec.R}, {"r", rec.r}}},
             {"fitted_runs", runs},
             {"rollouts", rollouts},
             {"summary",
              {{"audits", all.size()}, {"applicable", applicable}, {"satisfied", satisfied},
               {"violated", violated}}}},
            OutPath(o, "audit.json"));
  log << "audits: " << all.size() << " total, " << applicable << " applicable, " << satisfied
      << " satisfied, " << violated << " violated\n";
  return violated == 0 || !o.strict ? kExitOk : kExitVerification;
}

int CmdExport(const RunConfig& config, const CliOptions& o, std::ostream& log) {
  const Problem p = BuildProblem(config, true);
  const json meta = {{"config", config.ToJson()}};
  p.dataset->WriteCsv(OutPath(o, "dataset.csv"));
  WriteField(*p.density, OutPath(o, "density"), meta);
  WriteField(*p.energy, OutPath(o, "energy"), meta);
  log << "exported " << p.dataset->size() << " records and " << p.grid->num_cells() << " cells\n";
  return kExitOk;
}

int RunSubcommand(const std::string& name, const RunConfig& config, const CliOptions& options,
                  std::ostream& log) {
  try {
    fs::create_directories(options.out_dir);
    WriteJson(config.ToJson(), OutPath(options, "config.resolved.json"));
    if (name == "solve") return CmdSolve(config, options, log);
    if (name == "verify") return CmdVerify(config, options, log);
    if (name == "mpc") return CmdMpc(config, options, log);
    if (name == "sweep") return CmdSweep(config, options, log);
    if (name == "audit") return CmdAudit(config, options, log);
    if (name == "export") return CmdExport(config, options, log);
    log << "error: unknown subcommand '" << name << "'\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const MissingArtifact& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SolverNonConvergence& e) {
    log << "solver did not converge: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace ldm
