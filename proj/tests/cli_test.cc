#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace ldm {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliResult {
  int code{-1};
  std::string output;
};

CliResult RunCli(const std::string& args) {
  const std::string cmd = std::string(LDM_CLI_PATH) + " " + args + " 2>&1";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof(buf), pipe)) r.output += buf;
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string ReadText(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json ChainConfig() {
  return json::parse(ReadText(fs::path(LDM_SOURCE_DIR) / "configs" / "chain.json"));
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ldm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Write(const json& j, const std::string& name = "config.json") {
    const fs::path p = dir_ / name;
    std::ofstream(p) << j.dump(2);
    return p.string();
  }
  std::string Out(const std::string& name = "out") const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, MalformedJsonIsConfigError) {
  const fs::path p = dir_ / "bad.json";
  std::ofstream(p) << "{\"seed\": 0,";
  const CliResult r = RunCli("solve --config " + p.string() + " --out " + Out());
  EXPECT_EQ(r.code, 2) << r.output;
}

TEST_F(CliTest, UnknownKeyNamesFieldPath) {
  json c = ChainConfig();
  c["system"]["hight"] = 3;
  const CliResult r = RunCli("solve --config " + Write(c) + " --out " + Out());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("config.system"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("hight"), std::string::npos) << r.output;
}

TEST_F(CliTest, DiscountOutOfRangeIsConfigError) {
  json c = ChainConfig();
  c["solver"] = {{"gamma", 1.5}};
  const CliResult r = RunCli("solve --config " + Write(c) + " --out " + Out());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("config.solver"), std::string::npos) << r.output;
}

TEST_F(CliTest, MissingConfigOrSubcommandIsConfigError) {
  EXPECT_EQ(RunCli("solve --out " + Out()).code, 2);
  EXPECT_EQ(RunCli("frobnicate").code, 2);
  EXPECT_EQ(RunCli("--help").code, 0);
}

TEST_F(CliTest, MissingArtifactNamesPath) {
  const CliResult r = RunCli("verify --config " + Write(ChainConfig()) + " --out " + Out());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find((dir_ / "out" / "ldm.csv").string()), std::string::npos) << r.output;
}

TEST_F(CliTest, NonConvergenceExitsThreeAndKeepsReport) {
  json c = ChainConfig();
  c["solver"] = {{"max_sweeps", 2}};
  const CliResult r = RunCli("solve --config " + Write(c) + " --out " + Out());
  EXPECT_EQ(r.code, 3) << r.output;
  const json report = json::parse(ReadText(dir_ / "out" / "solve_report.json"));
  EXPECT_EQ(report["converged"], false);
}

TEST_F(CliTest, StrictVerifyFailureExitsFour) {
  const std::string cfg = Write(ChainConfig());
  ASSERT_EQ(RunCli("solve --config " + cfg + " --out " + Out()).code, 0);
  EXPECT_EQ(RunCli("verify --strict --config " + cfg + " --out " + Out()).code, 0);

  // The energy itself is no LDM on the chain.
  json c = ChainConfig();
  c["verify"] = {{"ldm", (dir_ / "out" / "energy.csv").string()}};
  const std::string bad = Write(c, "bad.json");
  EXPECT_EQ(RunCli("verify --config " + bad + " --out " + Out()).code, 0);
  EXPECT_EQ(RunCli("verify --strict --config " + bad + " --out " + Out()).code, 4);
  const json report = json::parse(ReadText(dir_ / "out" / "verify_report.json"));
  EXPECT_EQ(report["ok"], false);
  EXPECT_GT(report["conditions"]["condition1_violations"].get<int>(), 0);
}

TEST_F(CliTest, ResolvedConfigReproducesRun) {
  ASSERT_EQ(RunCli("solve --config " + Write(ChainConfig()) + " --out " + Out("a")).code, 0);
  const std::string resolved = (dir_ / "a" / "config.resolved.json").string();
  ASSERT_EQ(RunCli("solve --config " + resolved + " --out " + Out("b")).code, 0);
  EXPECT_EQ(ReadText(dir_ / "a" / "ldm.csv"), ReadText(dir_ / "b" / "ldm.csv"));
  EXPECT_EQ(ReadText(dir_ / "a" / "config.resolved.json"), ReadText(dir_ / "b" / "config.resolved.json"));
}

TEST_F(CliTest, ChainMpcStaysAtSafeLevel) {
  const CliResult r = RunCli("mpc --config " + Write(ChainConfig()) + " --out " + Out());
  ASSERT_EQ(r.code, 0) << r.output;
  const json j = json::parse(ReadText(dir_ / "out" / "rollouts.json"));
  ASSERT_EQ(j["rollouts"].size(), 1u);
  EXPECT_EQ(j["rollouts"][0]["min_density"], 0.125);
  EXPECT_EQ(j["rollouts"][0]["total_reward"], -3.0);
  EXPECT_EQ(j["rollouts"][0]["termination"], "max-steps");
  EXPECT_TRUE(fs::exists(dir_ / "out" / "rollout_0.csv"));
}

TEST_F(CliTest, ChainDensityMpcLeavesSupport) {
  json c = ChainConfig();
  c["constraint"]["kind"] = "density";
  c.erase("audit");
  ASSERT_EQ(RunCli("mpc --config " + Write(c) + " --out " + Out()).code, 0);
  const json j = json::parse(ReadText(dir_ / "out" / "rollouts.json"));
  EXPECT_LE(j["rollouts"][0]["min_density"].get<double>(), 0.0625);
}

TEST_F(CliTest, TabularAuditHasZeroError) {
  json c = ChainConfig();
  c["audit"] = {{"method", "tabular"}, {"gammas", {0.9}}, {"iterations", {5}}};
  ASSERT_EQ(RunCli("audit --config " + Write(c) + " --out " + Out()).code, 0);
  const json j = json::parse(ReadText(dir_ / "out" / "audit.json"));
  EXPECT_EQ(j["recoverability"]["R"], 32.0);
  ASSERT_EQ(j["fitted_runs"].size(), 1u);
  EXPECT_EQ(j["fitted_runs"][0]["lhs"], 0.0);
  EXPECT_EQ(j["fitted_runs"][0]["epsilon_ls"], 0.0);
  for (const json& a : j["fitted_runs"][0]["audits"]) EXPECT_TRUE(a["satisfied"].get<bool>());
}

TEST_F(CliTest, SweepWritesTables) {
  json c = ChainConfig();
  c["sweep"] = {{"percentiles", {50}}, {"seeds", {0, 1}}, {"n_steps", 20}};
  ASSERT_EQ(RunCli("sweep --jobs 2 --config " + Write(c) + " --out " + Out()).code, 0);
  const std::string runs = ReadText(dir_ / "out" / "sweep_runs.csv");
  EXPECT_EQ(runs.substr(0, runs.find('\n')),
            "kind,percentile,seed,threshold,mean_reward,failure_rate,min_density,fallback_steps");
  EXPECT_EQ(std::count(runs.begin(), runs.end(), '\n'), 1 + 3 * 2);
  const std::string summary = ReadText(dir_ / "out" / "sweep_summary.csv");
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 1 + 3);
}

TEST_F(CliTest, SeedOverrideChangesDataset) {
  json c = json::parse(ReadText(fs::path(LDM_SOURCE_DIR) / "configs" / "spiral_audit.json"));
  const std::string cfg = Write(c);
  ASSERT_EQ(RunCli("export --config " + cfg + " --out " + Out("a")).code, 0);
  ASSERT_EQ(RunCli("export --seed 7 --config " + cfg + " --out " + Out("b")).code, 0);
  ASSERT_EQ(RunCli("export --seed 7 --config " + cfg + " --out " + Out("c")).code, 0);
  EXPECT_NE(ReadText(dir_ / "a" / "dataset.csv"), ReadText(dir_ / "b" / "dataset.csv"));
  EXPECT_EQ(ReadText(dir_ / "b" / "dataset.csv"), ReadText(dir_ / "c" / "dataset.csv"));
  EXPECT_EQ(json::parse(ReadText(dir_ / "b" / "config.resolved.json"))["seed"], 7);
  EXPECT_TRUE(fs::exists(dir_ / "b" / "density.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "b" / "energy.json"));
}

}  // namespace
}  // namespace ldm
