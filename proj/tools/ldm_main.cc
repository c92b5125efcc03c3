#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ldm/cli/commands.h"
#include "ldm/cli/run_config.h"
#include "ldm/core/parallel.h"

int main(int argc, char** argv) {
  CLI::App app{"Lyapunov density models: solve, verify, plan and audit."};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  ldm::CliOptions options;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", options.out_dir, "output directory");
  app.add_option("--seed", seed, "overrides the configuration's seed");
  app.add_option("--jobs", options.jobs, "worker threads")->check(CLI::NonNegativeNumber);
  app.add_flag("--strict", options.strict, "exit 4 when a verification or audit fails");

  for (const char* name : {"solve", "verify", "mpc", "sweep", "audit", "export"}) {
    app.add_subcommand(name)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ldm::kExitConfig;
  }

  options.jobs = ldm::ResolveJobs(options.jobs);
  if (config_path.empty()) {
    std::cerr << "config error: --config is required\n";
    return ldm::kExitConfig;
  }
  ldm::RunConfig config;
  try {
    std::ifstream in(config_path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (seed) j["seed"] = *seed;
    config = ldm::RunConfig::FromJson(j);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return ldm::kExitConfig;
  }
  return ldm::RunSubcommand(app.get_subcommands().front()->get_name(), config, options, std::cerr);
}
