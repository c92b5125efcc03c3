#include "ldm/control/sweep.h"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <stdexcept>

#include "ldm/core/parallel.h"
#include "ldm/core/random.h"
#include "ldm/systems/chain.h"

namespace ldm {

namespace {

std::string Fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

SweepRun RunOne(const SweepTask& task, ConstraintKind kind, double pct, std::uint64_t seed) {
  const Evaluator& value = kind == ConstraintKind::kLdm ? task.ldm : task.energy;
  ConstraintSpec constraint = ConstraintFromPercentile(kind, value, task.dataset, pct);
  SweepRun run;
  run.kind = kind;
  run.percentile = pct;
  run.seed = seed;
  run.threshold = constraint.threshold;
  run.min_density = std::numeric_limits<double>::infinity();
  const auto model = task.model ? task.model : task.system;
  Rng start_rng = MakeRng(seed, "sweep");
  RolloutOptions opts;
  opts.n_steps = task.n_steps;
  opts.reward = task.mpc.reward;
  opts.density = task.density;
  opts.constraint = constraint;
  opts.failure = task.failure;
  double reward_sum = 0.0;
  int failures = 0;
  for (int r = 0; r < task.rollouts_per_seed; ++r) {
    Eigen::VectorXd start;
    if (!task.starts.empty()) {
      start = task.starts[static_cast<std::size_t>(r) % task.starts.size()];
    } else {
      if (task.dataset.empty()) throw std::invalid_argument("sweep needs start states or a dataset");
      std::uniform_int_distribution<std::size_t> pick(0, task.dataset.size() - 1);
      start = task.dataset[pick(start_rng)].state;
    }
    MpcConfig cfg = task.mpc;
    cfg.seed = SubstreamSeed(seed, "sweep-rollout-" + std::to_string(r));
    cfg.jobs = 1;
    MpcPlanner planner(cfg, constraint, model, task.grid);
    const RolloutRecord rec = Rollout(*task.system, *task.grid, MpcPolicy(planner), start, opts);
    reward_sum += rec.total_reward();
    failures += rec.failed() ? 1 : 0;
    run.min_density = std::min(run.min_density, rec.min_density());
    for (const auto& s : rec.steps) run.fallback_steps += s.fallback ? 1 : 0;
  }
  run.mean_reward = reward_sum / task.rollouts_per_seed;
  run.failure_rate = static_cast<double>(failures) / task.rollouts_per_seed;
  return run;
}

}  // namespace

SweepTable ThresholdSweep(const SweepTask& task, const std::vector<ConstraintKind>& kinds,
                          const std::vector<double>& percentiles,
                          const std::vector<std::uint64_t>& seeds, int jobs) {
  if (!task.system || !task.grid) throw std::invalid_argument("sweep task needs a system and a grid");
  if (task.rollouts_per_seed < 1) throw std::invalid_argument("rollouts_per_seed must be >= 1");
  if (seeds.empty()) throw std::invalid_argument("sweep needs at least one seed");
  struct Job {
    ConstraintKind kind;
    double pct;
    std::uint64_t seed;
  };
  std::vector<Job> plan;
  for (ConstraintKind k : kinds) {
    for (double p : percentiles) {
      for (std::uint64_t s : seeds) plan.push_back({k, p, s});
    }
  }
  SweepTable table;
  table.runs.resize(plan.size());
  ParallelFor(plan.size(), jobs, [&](std::size_t begin, std::size_t end, int) {
    for (std::size_t i = begin; i < end; ++i) {
      table.runs[i] = RunOne(task, plan[i].kind, plan[i].pct, plan[i].seed);
    }
  });
  for (std::size_t i = 0; i < plan.size(); i += seeds.size()) {
    std::vector<double> rewards, fails;
    for (std::size_t j = i; j < i + seeds.size(); ++j) {
      rewards.push_back(table.runs[j].mean_reward);
      fails.push_back(table.runs[j].failure_rate);
    }
    SweepSummary s;
    s.kind = plan[i].kind;
    s.percentile = plan[i].pct;
    s.reward_median = PercentileThreshold(rewards, 50.0);
    s.reward_p25 = PercentileThreshold(rewards, 25.0);
    s.reward_p75 = PercentileThreshold(rewards, 75.0);
    s.failure_median = PercentileThreshold(fails, 50.0);
    s.failure_p25 = PercentileThreshold(fails, 25.0);
    s.failure_p75 = PercentileThreshold(fails, 75.0);
    table.summary.push_back(s);
  }
  return table;
}

void SweepTable::WriteRunsCsv(std::ostream& out) const {
  out << "kind,percentile,seed,threshold,mean_reward,failure_rate,min_density,fallback_steps\n";
  for (const SweepRun& r : runs) {
    out << ToString(r.kind) << ',' << Fmt(r.percentile) << ',' << r.seed << ','
        << Fmt(r.kind == ConstraintKind::kNone ? std::nan("") : r.threshold) << ','
        << Fmt(r.mean_reward) << ',' << Fmt(r.failure_rate) << ',' << Fmt(r.min_density) << ','
        << r.fallback_steps << '\n';
  }
}

void SweepTable::WriteSummaryCsv(std::ostream& out) const {
  out << "kind,percentile,reward_median,reward_p25,reward_p75,failure_median,failure_p25,"
         "failure_p75\n";
  for (const SweepSummary& s : summary) {
    out << ToString(s.kind) << ',' << Fmt(s.percentile) << ',' << Fmt(s.reward_median) << ','
        << Fmt(s.reward_p25) << ',' << Fmt(s.reward_p75) << ',' << Fmt(s.failure_median) << ','
        << Fmt(s.failure_p25) << ',' << Fmt(s.failure_p75) << '\n';
  }
}

SweepTask ChainSweepTask(const ChainSystem& chain, const ScalarField& energy,
                         const ScalarField& ldm, std::size_t dataset_size, std::uint64_t seed) {
  auto system = std::make_shared<const ChainSystem>(chain);
  SweepTask task;
  task.name = "chain";
  task.system = system;
  task.grid = energy.grid_ptr();
  task.density = [system](std::span<const double> s, std::span<const double> a) {
    return system->Density(std::lround(s[0]), std::lround(a[0]));
  };
  task.energy = FieldEvaluator(energy);
  task.ldm = FieldEvaluator(ldm);
  task.dataset = SampleChainDataset(chain, dataset_size, seed);
  task.mpc.horizon = chain.horizon();
  task.mpc.grid_actions = true;
  task.mpc.reward = RewardSpec::Action();
  task.n_steps = 100;
  task.starts = {Eigen::VectorXd::Zero(1)};
  task.failure = ZeroDensityFailure(task.density, task.grid);
  return task;
}

}  // namespace ldm
