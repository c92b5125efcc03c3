#include "ldm/control/rollout.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace ldm {

Policy MpcPolicy(MpcPlanner& planner) {
  return [&planner](std::span<const double> state) {
    MpcDecision d = planner.Decide(state);
    return PolicyStep{std::move(d.action), d.fallback};
  };
}

Policy GreedyLdmPolicy(Evaluator value, std::shared_ptr<const StateActionGrid> grid) {
  return [value = std::move(value), grid = std::move(grid)](std::span<const double> state) {
    return PolicyStep{GreedyPolicy(value, *grid, state).action, false};
  };
}

std::string ToString(Termination t) {
  switch (t) {
    case Termination::kMaxSteps: return "max-steps";
    case Termination::kFailure: return "failure";
    case Termination::kDomainExit: return "domain-exit";
  }
  return "unknown";
}

double RolloutRecord::total_reward() const {
  double r = 0.0;
  for (const auto& s : steps) r += s.reward;
  return r;
}

double RolloutRecord::min_density() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : steps) m = std::min(m, s.density);
  return m;
}

namespace {

std::string Fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void RolloutRecord::WriteCsv(std::ostream& out) const {
  const int ds = steps.empty() ? static_cast<int>(final_state.size())
                               : static_cast<int>(steps.front().state.size());
  const int da = steps.empty() ? 0 : static_cast<int>(steps.front().action.size());
  out << "step";
  for (int i = 0; i < ds; ++i) out << ",s" << i;
  for (int i = 0; i < da; ++i) out << ",a" << i;
  out << ",reward,density,constraint,fallback\n";
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const RolloutStep& s = steps[t];
    out << t;
    for (int i = 0; i < ds; ++i) out << ',' << Fmt(s.state[i]);
    for (int i = 0; i < da; ++i) out << ',' << Fmt(s.action[i]);
    out << ',' << Fmt(s.reward) << ',' << Fmt(s.density) << ',' << Fmt(s.constraint_value) << ','
        << (s.fallback ? 1 : 0) << '\n';
  }
}

void RolloutRecord::WriteCsv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  WriteCsv(f);
}

nlohmann::json RolloutRecord::Summary() const {
  std::size_t fallbacks = 0;
  for (const auto& s : steps) fallbacks += s.fallback ? 1 : 0;
  const double md = min_density();
  return {{"steps", steps.size()},
          {"termination", ToString(termination)},
          {"total_reward", total_reward()},
          {"min_density", std::isfinite(md) ? nlohmann::json(md) : nlohmann::json(nullptr)},
          {"fallback_steps", fallbacks},
          {"final_state", std::vector<double>(final_state.data(), final_state.data() + final_state.size())}};
}

RolloutRecord Rollout(const DynamicalSystem& system, const StateActionGrid& grid,
                      const Policy& policy, const Eigen::VectorXd& start,
                      const RolloutOptions& options) {
  if (options.n_steps < 0) throw std::invalid_argument("n_steps must be >= 0");
  RolloutRecord rec;
  Eigen::VectorXd s = start;
  Eigen::VectorXd next(system.state_dim());
  auto span_of = [](const Eigen::VectorXd& v) {
    return std::span<const double>(v.data(), static_cast<std::size_t>(v.size()));
  };
  if (!grid.StateInBounds(span_of(s))) {
    rec.final_state = s;
    rec.termination = Termination::kDomainExit;
    return rec;
  }
  for (int t = 0; t < options.n_steps; ++t) {
    if (options.failure && options.failure(span_of(s))) {
      rec.final_state = s;
      rec.termination = Termination::kFailure;
      return rec;
    }
    PolicyStep p = policy(span_of(s));
    RolloutStep step;
    step.state = s;
    step.action = p.action;
    step.fallback = p.fallback;
    step.reward = options.reward(span_of(s), span_of(p.action));
    step.density = options.density ? options.density(span_of(s), span_of(p.action))
                                   : std::numeric_limits<double>::quiet_NaN();
    step.constraint_value = options.constraint.Value(span_of(s), span_of(p.action));
    rec.steps.push_back(step);
    system.Step(span_of(s), span_of(p.action), std::span<double>(next.data(), next.size()));
    s = next;
    if (!grid.StateInBounds(span_of(s))) {
      rec.final_state = s;
      rec.termination = Termination::kDomainExit;
      return rec;
    }
  }
  rec.final_state = s;
  rec.termination = Termination::kMaxSteps;
  return rec;
}

std::function<bool(std::span<const double>)> ZeroDensityFailure(
    Evaluator density, std::shared_ptr<const StateActionGrid> grid) {
  return [density = std::move(density), grid = std::move(grid)](std::span<const double> state) {
    Eigen::VectorXd a(grid->action_dim());
    for (std::size_t i = 0; i < grid->num_actions(); ++i) {
      grid->ActionNodeInto(i, std::span<double>(a.data(), a.size()));
      if (density(state, std::span<const double>(a.data(), a.size())) > 0.0) return false;
    }
    return true;
  };
}

}  // namespace ldm
