#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "ldm/control/mpc.h"
#include "ldm/core/dataset.h"
#include "ldm/core/field.h"
#include "ldm/density/density.h"
#include "ldm/solver/fitted.h"
#include "ldm/solver/solver.h"
#include "ldm/systems/data_collection.h"
#include "ldm/systems/dynamical_system.h"

namespace ldm {

/// Malformed or inconsistent configuration; the message starts with the
/// offending field path ("config.solver.gamma: ...").
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A referenced input file does not exist.
class MissingArtifact : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every setting of a run with all defaults filled in. Sections that only
/// some subcommands read are still resolved, so config.resolved.json
/// reproduces any subcommand.
struct RunConfig {
  std::uint64_t seed{0};
  /// {"kind": "linear-spiral", beta, omega, dt} or {"kind": "chain", H, K, epsilon}.
  nlohmann::json system;
  /// Grid bounds and node counts; derived for the chain.
  nlohmann::json grid;
  DataPolicy policy;
  std::size_t n_samples{100000};
  DensityConfig density;
  SolverConfig solver;
  /// {"kind", "threshold" | "c" | "percentile", "field"?}
  nlohmann::json constraint;
  MpcConfig mpc;
  /// {"n_steps", "starts": [[...], ...]}
  nlohmann::json rollout;
  /// {"kinds", "percentiles", "seeds", "rollouts_per_seed", "n_steps"}
  nlohmann::json sweep;
  /// {"ldm"?, "energy"?, "thresholds" | "count", "slack", "clf"?}
  nlohmann::json verify;
  /// {"method", "gammas", "iterations", "n_samples", "centers", "ridge", "seeds", "epsilon_fin"?}
  nlohmann::json audit;

  bool is_chain() const { return system.at("kind") == "chain"; }

  /// Throws ConfigError.
  static RunConfig FromJson(const nlohmann::json& j);
  /// Parses the file; syntax errors report line and column.
  static RunConfig Load(const std::string& path);
  nlohmann::json ToJson() const;
};

/// The objects a run works with, built once from the config.
struct Problem {
  std::shared_ptr<const DynamicalSystem> system;
  std::shared_ptr<const StateActionGrid> grid;
  /// Reference density P at any point (analytic).
  Evaluator true_density;
  /// The reference density tabulated on the grid.
  std::shared_ptr<const ScalarField> reference_density;
  /// Density used to build the energy (analytic or estimated) and E.
  std::shared_ptr<const ScalarField> density;
  std::shared_ptr<const ScalarField> energy;
  /// Present when the density was estimated or a dataset was requested.
  std::shared_ptr<const TransitionDataset> dataset;
};

/// Builds the system, grid and density fields. The dataset is drawn when
/// the estimator needs it or `with_dataset` is set.
Problem BuildProblem(const RunConfig& config, bool with_dataset = false);

}  // namespace ldm
