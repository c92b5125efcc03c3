#pragma once

#include <iosfwd>
#include <string>

#include "ldm/cli/run_config.h"

namespace ldm {

enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitConfig = 2,
  kExitNonConvergence = 3,
  kExitVerification = 4,
};

struct CliOptions {
  std::string out_dir{"."};
  int jobs{1};
  /// Verification failures exit with kExitVerification.
  bool strict{false};
};

/// solve: density, energy and LDM fields plus solve_report.json.
int CmdSolve(const RunConfig& config, const CliOptions& options, std::ostream& log);
/// verify: LDM conditions, invariance per threshold and (optionally) the
/// extracted CLF, written to verify_report.json.
int CmdVerify(const RunConfig& config, const CliOptions& options, std::ostream& log);
/// mpc: one rollout per start state (rollout_<i>.csv) and rollouts.json.
int CmdMpc(const RunConfig& config, const CliOptions& options, std::ostream& log);
/// sweep: sweep_runs.csv and sweep_summary.csv.
int CmdSweep(const RunConfig& config, const CliOptions& options, std::ostream& log);
/// audit: fitted-iteration, rollout and reward-gap bound audits in audit.json.
int CmdAudit(const RunConfig& config, const CliOptions& options, std::ostream& log);
/// export: dataset.csv and the density and energy fields.
int CmdExport(const RunConfig& config, const CliOptions& options, std::ostream& log);

/// Dispatches by name, writes config.resolved.json first and maps
/// exceptions to exit codes (config and missing-artifact errors 2, solver
/// non-convergence 3, anything else 1).
int RunSubcommand(const std::string& name, const RunConfig& config, const CliOptions& options,
                  std::ostream& log);

}  // namespace ldm
