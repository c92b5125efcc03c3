#include "ldm/cli/run_config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ldm/systems/chain.h"
#include "ldm/systems/lqr.h"

namespace ldm {

namespace {

using nlohmann::json;

void CheckKeys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw ConfigError(path + ": unknown key '" + k + "'");
  }
}

// Runs `f`, prefixing any non-config error with the section path.
template <typename F>
auto InSection(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json Section(const json& root, const char* key) {
  return root.contains(key) ? root.at(key) : json::object();
}

Eigen::VectorXd JsonVec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json ResolveSystem(const json& in) {
  CheckKeys(in, "config.system", {"kind", "beta", "omega", "dt", "H", "K", "epsilon"});
  if (!in.contains("kind")) throw ConfigError("config.system.kind: required");
  const std::string kind = in.at("kind").get<std::string>();
  if (kind == "linear-spiral") {
    for (const char* k : {"H", "K", "epsilon"}) {
      if (in.contains(k)) throw ConfigError(std::string("config.system.") + k + ": not a spiral parameter");
    }
    json out = {{"kind", kind},
                {"beta", in.value("beta", LinearSpiralSystem::kDefaultBeta)},
                {"omega", in.value("omega", LinearSpiralSystem::kDefaultOmega)},
                {"dt", in.value("dt", LinearSpiralSystem::kDefaultDt)}};
    InSection("config.system", [&] {
      BuildLinearSpiral(out["beta"], out["omega"], out["dt"]);
      return 0;
    });
    return out;
  }
  if (kind == "chain") {
    for (const char* k : {"beta", "omega", "dt"}) {
      if (in.contains(k)) throw ConfigError(std::string("config.system.") + k + ": not a chain parameter");
    }
    json out = {{"kind", kind},
                {"H", in.value("H", 3)},
                {"K", in.value("K", 32)},
                {"epsilon", in.value("epsilon", 1.0 / 16.0)}};
    InSection("config.system", [&] {
      BuildChain(out["H"], out["K"], out["epsilon"]);
      return 0;
    });
    return out;
  }
  throw ConfigError("config.system.kind: unknown system '" + kind + "' (expected linear-spiral or chain)");
}

json ResolveGrid(const json& in) {
  CheckKeys(in, "config.grid",
            {"state_lo", "state_hi", "state_counts", "action_lo", "action_hi", "action_counts"});
  json out = {{"state_lo", in.value("state_lo", std::vector<double>{-10, -10})},
              {"state_hi", in.value("state_hi", std::vector<double>{10, 10})},
              {"state_counts", in.value("state_counts", std::vector<int>{201, 201})},
              {"action_lo", in.value("action_lo", std::vector<double>{-5})},
              {"action_hi", in.value("action_hi", std::vector<double>{5})},
              {"action_counts", in.value("action_counts", std::vector<int>{101})}};
  InSection("config.grid", [&] {
    if (out["state_lo"].size() != 2 || out["state_hi"].size() != 2 || out["state_counts"].size() != 2) {
      throw std::invalid_argument("the spiral state is 2-D");
    }
    if (out["action_lo"].size() != 1 || out["action_hi"].size() != 1 || out["action_counts"].size() != 1) {
      throw std::invalid_argument("the spiral action is 1-D");
    }
    StateActionGrid::FromBounds(JsonVec(out["state_lo"]), JsonVec(out["state_hi"]),
                                out["state_counts"].get<std::vector<int>>(), JsonVec(out["action_lo"]),
                                JsonVec(out["action_hi"]), out["action_counts"].get<std::vector<int>>());
    return 0;
  });
  return out;
}

json ChainGridJson(const json& system) {
  const ChainSystem chain = BuildChain(system["H"], system["K"], system["epsilon"]);
  const int ns = chain.max_state() - chain.min_state() + 1;
  const int na = chain.max_action() - chain.min_action() + 1;
  return {{"state_lo", {chain.min_state()}}, {"state_hi", {chain.max_state()}}, {"state_counts", {ns}},
          {"action_lo", {chain.min_action()}}, {"action_hi", {chain.max_action()}}, {"action_counts", {na}}};
}

std::shared_ptr<const StateActionGrid> GridFromConfig(const json& g) {
  return std::make_shared<const StateActionGrid>(StateActionGrid::FromBounds(
      JsonVec(g["state_lo"]), JsonVec(g["state_hi"]), g["state_counts"].get<std::vector<int>>(),
      JsonVec(g["action_lo"]), JsonVec(g["action_hi"]), g["action_counts"].get<std::vector<int>>()));
}

LinearSpiralSystem SpiralFromConfig(const json& s) {
  return BuildLinearSpiral(s["beta"], s["omega"], s["dt"]);
}

json ResolveConstraint(const json& in, const json& system) {
  CheckKeys(in, "config.constraint", {"kind", "threshold", "c", "percentile", "field"});
  json out = {{"kind", in.value("kind", std::string("ldm"))}};
  InSection("config.constraint.kind", [&] { return ConstraintKindFromString(out["kind"]); });
  const int given = static_cast<int>(in.contains("threshold")) + static_cast<int>(in.contains("c")) +
                    static_cast<int>(in.contains("percentile"));
  if (given > 1) throw ConfigError("config.constraint: give at most one of threshold, c, percentile");
  if (in.contains("threshold")) {
    out["threshold"] = in.at("threshold").get<double>();
  } else if (in.contains("c")) {
    const double c = in.at("c").get<double>();
    if (!(c > 0.0 && c <= 1.0)) throw ConfigError("config.constraint.c: must lie in (0, 1]");
    out["c"] = c;
  } else if (in.contains("percentile")) {
    const double p = in.at("percentile").get<double>();
    if (!(p >= 0.0 && p <= 100.0)) throw ConfigError("config.constraint.percentile: must lie in [0, 100]");
    out["percentile"] = p;
  } else if (system["kind"] == "chain") {
    out["c"] = 1.0 / (2.0 * (system["H"].get<int>() + 1));
  } else {
    out["percentile"] = 50.0;
  }
  if (in.contains("field")) out["field"] = in.at("field").get<std::string>();
  return out;
}

MpcConfig ResolveMpc(const json& in, const json& system, std::uint64_t seed) {
  CheckKeys(in, "config.mpc",
            {"horizon", "n_candidates", "grid_actions", "enumeration_limit", "reward", "dynamics", "seed"});
  const bool chain = system["kind"] == "chain";
  json j = in;
  if (!j.contains("horizon")) j["horizon"] = chain ? system["H"].get<int>() : 1;
  if (!j.contains("grid_actions")) j["grid_actions"] = chain;
  if (!j.contains("reward")) {
    j["reward"] = chain ? json{{"kind", "action"}} : json{{"kind", "goal-distance"}, {"goal", {0.0, 0.0}}};
  }
  if (!j.contains("seed")) j["seed"] = seed;
  MpcConfig c = InSection("config.mpc", [&] { return MpcConfig::FromJson(j); });
  if (chain && c.reward.kind != RewardSpec::Kind::kAction) {
    throw ConfigError("config.mpc.reward: the chain reward is the action");
  }
  if (chain && c.dynamics == PlanningDynamics::kFittedModel) {
    throw ConfigError("config.mpc.dynamics: the chain plans with its true dynamics");
  }
  if (!chain && c.reward.kind == RewardSpec::Kind::kGoalDistance && c.reward.goal.size() != 2) {
    throw ConfigError("config.mpc.reward.goal: the spiral goal is 2-D");
  }
  return c;
}

std::vector<std::vector<double>> StartList(const json& j, const std::string& path, std::size_t dim) {
  std::vector<std::vector<double>> out;
  for (const auto& s : j) {
    auto v = s.get<std::vector<double>>();
    if (v.size() != dim) throw ConfigError(path + ": start states must have " + std::to_string(dim) + " entries");
    out.push_back(std::move(v));
  }
  return out;
}

json ResolveRollout(const json& in, const json& system) {
  CheckKeys(in, "config.rollout", {"n_steps", "starts", "n_rollouts"});
  const bool chain = system["kind"] == "chain";
  json out = {{"n_steps", in.value("n_steps", 100)}, {"n_rollouts", in.value("n_rollouts", 1)}};
  if (out["n_steps"].get<int>() < 0) throw ConfigError("config.rollout.n_steps: must be >= 0");
  if (out["n_rollouts"].get<int>() < 1) throw ConfigError("config.rollout.n_rollouts: must be >= 1");
  json starts = in.contains("starts") ? in.at("starts")
                                      : (chain ? json::array({{0.0}}) : json::array({{4.0, 0.0}}));
  out["starts"] = StartList(starts, "config.rollout.starts", chain ? 1 : 2);
  return out;
}

json ResolveSweep(const json& in, const json& system) {
  CheckKeys(in, "config.sweep", {"kinds", "percentiles", "seeds", "rollouts_per_seed", "n_steps"});
  const bool chain = system["kind"] == "chain";
  json out = {{"kinds", in.value("kinds", std::vector<std::string>{"ldm", "density", "none"})},
              {"percentiles", in.value("percentiles", std::vector<double>{10, 25, 50, 75, 90})},
              {"seeds", in.value("seeds", std::vector<std::uint64_t>{0, 1, 2, 3, 4})},
              {"rollouts_per_seed", in.value("rollouts_per_seed", chain ? 1 : 4)},
              {"n_steps", in.value("n_steps", chain ? 100 : 50)}};
  for (const auto& k : out["kinds"]) {
    InSection("config.sweep.kinds", [&] { return ConstraintKindFromString(k.get<std::string>()); });
  }
  for (const auto& p : out["percentiles"]) {
    if (!(p.get<double>() >= 0.0 && p.get<double>() <= 100.0)) {
      throw ConfigError("config.sweep.percentiles: entries must lie in [0, 100]");
    }
  }
  if (out["seeds"].empty()) throw ConfigError("config.sweep.seeds: need at least one seed");
  if (out["rollouts_per_seed"].get<int>() < 1) throw ConfigError("config.sweep.rollouts_per_seed: must be >= 1");
  return out;
}

json ResolveVerify(const json& in, const json& system) {
  CheckKeys(in, "config.verify", {"ldm", "energy", "thresholds", "count", "slack", "clf"});
  json out = {{"slack", in.value("slack", 1e-8)}};
  if (in.contains("thresholds")) {
    out["thresholds"] = in.at("thresholds").get<std::vector<double>>();
  } else {
    out["count"] = in.value("count", 10);
    if (out["count"].get<int>() < 0) throw ConfigError("config.verify.count: must be >= 0");
  }
  if (in.contains("ldm")) out["ldm"] = in.at("ldm").get<std::string>();
  if (in.contains("energy")) out["energy"] = in.at("energy").get<std::string>();
  if (in.contains("clf")) {
    const json& c = in.at("clf");
    CheckKeys(c, "config.verify.clf", {"state", "action", "tolerance"});
    if (system["kind"] != "linear-spiral") throw ConfigError("config.verify.clf: only for the spiral");
    out["clf"] = {{"state", c.value("state", std::vector<double>{0, 0})},
                  {"action", c.value("action", std::vector<double>{0})},
                  {"tolerance", c.value("tolerance", 0.0)}};
  }
  return out;
}

json ResolveAudit(const json& in, std::uint64_t seed) {
  CheckKeys(in, "config.audit",
            {"method", "gammas", "iterations", "n_samples", "centers", "ridge", "seeds", "epsilon_fin"});
  json out = {{"method", in.value("method", std::string("rbf"))},
              {"gammas", in.value("gammas", std::vector<double>{0.9, 0.99})},
              {"iterations", in.value("iterations", std::vector<int>{5, 20})},
              {"n_samples", in.value("n_samples", 5000)},
              {"centers", in.value("centers", RbfBasis::kDefaultCenters)},
              {"ridge", in.value("ridge", 1e-8)},
              {"seeds", in.value("seeds", std::vector<std::uint64_t>{seed})}};
  const std::string m = out["method"];
  if (m != "rbf" && m != "one-hot" && m != "tabular") {
    throw ConfigError("config.audit.method: expected rbf, one-hot or tabular");
  }
  for (const auto& g : out["gammas"]) {
    if (!(g.get<double>() > 0.0 && g.get<double>() <= 1.0)) {
      throw ConfigError("config.audit.gammas: entries must lie in (0, 1]");
    }
  }
  for (const auto& k : out["iterations"]) {
    if (k.get<int>() < 0) throw ConfigError("config.audit.iterations: entries must be >= 0");
  }
  if (in.contains("epsilon_fin")) out["epsilon_fin"] = in.at("epsilon_fin").get<double>();
  return out;
}

}  // namespace

RunConfig RunConfig::FromJson(const json& j) {
  CheckKeys(j, "config", {"seed", "system", "grid", "data", "density", "solver", "constraint", "mpc",
                          "rollout", "sweep", "verify", "audit"});
  RunConfig c;
  try {
    c.seed = j.value("seed", std::uint64_t{0});
    if (!j.contains("system")) throw ConfigError("config.system: required");
    c.system = ResolveSystem(j.at("system"));
    const bool chain = c.is_chain();
    if (chain) {
      if (j.contains("grid")) throw ConfigError("config.grid: the chain grid is derived from H and K");
      c.grid = ChainGridJson(c.system);
    } else {
      c.grid = ResolveGrid(Section(j, "grid"));
    }

    const json data = Section(j, "data");
    CheckKeys(data, "config.data", {"policy", "n_samples"});
    c.n_samples = data.value("n_samples", std::size_t{100000});
    if (c.n_samples < 1) throw ConfigError("config.data.n_samples: must be >= 1");
    if (chain) {
      if (data.contains("policy")) throw ConfigError("config.data.policy: the chain samples its own table");
    } else {
      json pol = data.contains("policy") ? data.at("policy")
                                         : json{{"kind", "lqr-mean-gaussian"}, {"sigma", 1.0}};
      CheckKeys(pol, "config.data.policy", {"kind", "sigma", "state_sigma", "gain", "rho", "sigma_r", "sigma_a"});
      c.policy = InSection("config.data.policy", [&] { return DataPolicy::FromJson(pol); });
      if (c.policy.kind == DataPolicy::Kind::kLqrMeanGaussian && c.policy.gain.size() == 0) {
        c.policy.gain = DefaultSpiralLqr(SpiralFromConfig(c.system)).gain;
      }
      if (c.policy.kind == DataPolicy::Kind::kLqrMeanGaussian &&
          (c.policy.gain.rows() != 1 || c.policy.gain.cols() != 2)) {
        throw ConfigError("config.data.policy.gain: expected a 1x2 matrix");
      }
    }

    const json dens = Section(j, "density");
    CheckKeys(dens, "config.density", {"estimator", "bandwidth", "floor"});
    json dj = dens;
    if (!dj.contains("estimator")) dj["estimator"] = "analytic";
    c.density = InSection("config.density", [&] { return DensityConfig::FromJson(dj); });
    if (chain && c.density.estimator != DensityEstimator::kAnalytic) {
      throw ConfigError("config.density.estimator: the chain density is its exact table (analytic)");
    }

    const json sol = Section(j, "solver");
    CheckKeys(sol, "config.solver", {"gamma", "tolerance", "max_sweeps", "interpolation", "record_history"});
    c.solver = InSection("config.solver", [&] { return SolverConfig::FromJson(sol); });

    c.constraint = ResolveConstraint(Section(j, "constraint"), c.system);
    c.mpc = ResolveMpc(Section(j, "mpc"), c.system, c.seed);
    c.rollout = ResolveRollout(Section(j, "rollout"), c.system);
    c.sweep = ResolveSweep(Section(j, "sweep"), c.system);
    c.verify = ResolveVerify(Section(j, "verify"), c.system);
    c.audit = ResolveAudit(Section(j, "audit"), c.seed);
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::Load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw MissingArtifact("cannot open config file " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return FromJson(j);
}

json RunConfig::ToJson() const {
  json j = {{"seed", seed}, {"system", system}};
  if (!is_chain()) {
    j["grid"] = grid;
    j["data"] = {{"policy", policy.Describe()}, {"n_samples", n_samples}};
  } else {
    j["data"] = {{"n_samples", n_samples}};
  }
  j["density"] = density.ToJson();
  j["solver"] = solver.ToJson();
  j["constraint"] = constraint;
  j["mpc"] = mpc.ToJson();
  j["rollout"] = rollout;
  j["sweep"] = sweep;
  j["verify"] = verify;
  j["audit"] = audit;
  return j;
}

Problem BuildProblem(const RunConfig& config, bool with_dataset) {
  Problem p;
  const bool estimated = config.density.estimator != DensityEstimator::kAnalytic;
  std::shared_ptr<const AnalyticDensity> analytic;
  if (config.is_chain()) {
    auto chain = std::make_shared<const ChainSystem>(
        BuildChain(config.system["H"], config.system["K"], config.system["epsilon"]));
    p.system = chain;
    p.grid = chain->MakeGrid();
    analytic = std::make_shared<const AnalyticDensity>(*chain);
    if (with_dataset) {
      p.dataset = std::make_shared<const TransitionDataset>(
          SampleChainDataset(*chain, config.n_samples, config.seed));
    }
  } else {
    auto spiral = std::make_shared<const LinearSpiralSystem>(SpiralFromConfig(config.system));
    p.system = spiral;
    p.grid = GridFromConfig(config.grid);
    analytic = std::make_shared<const AnalyticDensity>(config.policy, *p.grid);
    if (with_dataset || estimated) {
      p.dataset = std::make_shared<const TransitionDataset>(
          CollectDataset(*spiral, *p.grid, config.policy, config.n_samples, config.seed));
    }
  }
  p.true_density = [analytic](std::span<const double> s, std::span<const double> a) {
    return analytic->Evaluate(s, a);
  };
  p.reference_density = std::make_shared<const ScalarField>(analytic->ToField(p.grid));
  p.density = estimated ? std::make_shared<const ScalarField>(
                              EstimateDensity(*p.dataset, p.grid, config.density))
                        : p.reference_density;
  p.energy = std::make_shared<const ScalarField>(ToEnergy(*p.density, config.density.floor));
  return p;
}

}  // namespace ldm
