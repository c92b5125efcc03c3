#include "ldm/solver/solver.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "ldm/core/parallel.h"
#include "ldm/core/stencil_ops.h"
#include "ldm/solver/successor.h"

namespace ldm {

std::string ToString(Interpolation mode) {
  return mode == Interpolation::kNearest ? "nearest" : "multilinear";
}

Interpolation InterpolationFromString(const std::string& name) {
  if (name == "multilinear") return Interpolation::kMultilinear;
  if (name == "nearest") return Interpolation::kNearest;
  throw std::invalid_argument("unknown interpolation '" + name + "'");
}

void SolverConfig::Validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("solver.gamma must lie in (0, 1], got " + std::to_string(gamma));
  }
  if (!(tolerance > 0.0)) throw std::invalid_argument("solver.tolerance must be > 0");
  if (max_sweeps < 1) throw std::invalid_argument("solver.max_sweeps must be >= 1");
  if (jobs < 0) throw std::invalid_argument("solver.jobs must be >= 0");
}

nlohmann::json SolverConfig::ToJson() const {
  return {{"gamma", gamma},
          {"tolerance", tolerance},
          {"max_sweeps", max_sweeps},
          {"interpolation", ToString(interpolation)},
          {"record_history", record_history}};
}

SolverConfig SolverConfig::FromJson(const nlohmann::json& j) {
  SolverConfig c;
  c.gamma = j.value("gamma", c.gamma);
  c.tolerance = j.value("tolerance", c.tolerance);
  c.max_sweeps = j.value("max_sweeps", c.max_sweeps);
  if (j.contains("interpolation")) c.interpolation = InterpolationFromString(j.at("interpolation"));
  c.record_history = j.value("record_history", c.record_history);
  c.Validate();
  return c;
}

nlohmann::json SolveReport::ToJson() const {
  nlohmann::json j = {{"sweeps", sweeps},
                      {"residual", residual},
                      {"monotone", monotone},
                      {"converged", converged},
                      {"wall_seconds", wall_seconds}};
  j["residuals"] = residuals;
  j["active_cells"] = active_cells;
  return j;
}

namespace {

void CheckPair(const ScalarField& G, const ScalarField& E) {
  if (!G.SameGrid(E)) throw std::invalid_argument("G and E live on different grids");
  if (E.role() != FieldRole::kEnergy) {
    throw std::invalid_argument("E must have the energy role, got " + ToString(E.role()));
  }
}

struct SweepStats {
  double residual{0.0};
  bool monotone{true};
  std::size_t active{0};
};

// Jacobi sweeps with change tracking. A cell is recomputed only when a node
// its successor stencil may read changed in the previous sweep; skipped
// cells would reproduce their previous value exactly.
class SweepEngine {
 public:
  SweepEngine(const ScalarField& E, const DynamicalSystem& system, double gamma,
              Interpolation mode, int jobs)
      : E_(E),
        gamma_(gamma),
        jobs_(ResolveJobs(jobs)),
        succ_(E.grid(), system, mode, jobs_),
        changed_(E.grid().num_states(), 1),
        changed_next_(E.grid().num_states(), 0) {}

  SweepStats Sweep(const std::vector<double>& cur, std::vector<double>& next, bool all) {
    const StateActionGrid& grid = E_.grid();
    const std::size_t na = grid.num_actions();
    const double off = E_.sentinel();
    std::vector<SweepStats> stats(jobs_);
    ParallelFor(grid.num_states(), jobs_, [&](std::size_t begin, std::size_t end, int w) {
      std::vector<double> row(na);
      SweepStats st;
      for (std::size_t s = begin; s < end; ++s) {
        bool any = false;
        for (std::size_t a = 0; a < na; ++a) {
          const std::size_t c = s * na + a;
          if (!all && !succ_.Touches(c, changed_)) {
            next[c] = cur[c];
            continue;
          }
          ++st.active;
          const StateStencil sten = succ_.Stencil(c);
          double cont = off;
          if (sten.inside) {
            // Convex weights cannot exceed the sentinel; clip round-off.
            cont = std::min(StencilRowMin(sten, cur.data(), na, row), off);
          }
          const double v = std::max(E_[c], gamma_ * cont);
          next[c] = v;
          if (v != cur[c]) {
            any = true;
            st.residual = std::max(st.residual, std::abs(v - cur[c]));
            if (v < cur[c]) st.monotone = false;
          }
        }
        changed_next_[s] = any ? 1 : 0;
      }
      stats[w] = st;
    });
    changed_.swap(changed_next_);
    SweepStats total;
    for (const SweepStats& st : stats) {
      total.residual = std::max(total.residual, st.residual);
      total.monotone = total.monotone && st.monotone;
      total.active += st.active;
    }
    return total;
  }

  const SuccessorStencils& successors() const { return succ_; }

 private:
  const ScalarField& E_;
  double gamma_;
  int jobs_;
  SuccessorStencils succ_;
  std::vector<std::uint8_t> changed_;
  std::vector<std::uint8_t> changed_next_;
};

}  // namespace

ScalarField LdmBackup(const ScalarField& G, const ScalarField& E, const DynamicalSystem& system,
                      double gamma, Interpolation mode, int jobs) {
  CheckPair(G, E);
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
  SweepEngine engine(E, system, gamma, mode, jobs);
  std::vector<double> next(G.values().size());
  engine.Sweep(G.values(), next, true);
  return ScalarField(G.grid_ptr(), std::move(next), FieldRole::kLdm,
                     std::max(E.sentinel(), G.sentinel()));
}

ScalarField IterateLdm(const ScalarField& E, const DynamicalSystem& system, double gamma,
                       int sweeps, Interpolation mode, int jobs) {
  if (E.role() != FieldRole::kEnergy) throw std::invalid_argument("E must have the energy role");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
  if (sweeps < 0) throw std::invalid_argument("sweeps must be >= 0");
  SweepEngine engine(E, system, gamma, mode, jobs);
  std::vector<double> cur = E.values();
  std::vector<double> next(cur.size());
  for (int k = 0; k < sweeps; ++k) {
    engine.Sweep(cur, next, k == 0);
    cur.swap(next);
  }
  return ScalarField(E.grid_ptr(), std::move(cur), FieldRole::kLdm, E.sentinel());
}

SolveResult SolveMaximalLdm(const ScalarField& E, const DynamicalSystem& system,
                            const SolverConfig& config) {
  config.Validate();
  if (E.role() != FieldRole::kEnergy) throw std::invalid_argument("E must have the energy role");
  const auto t0 = std::chrono::steady_clock::now();
  SweepEngine engine(E, system, config.gamma, config.interpolation, config.jobs);
  std::vector<double> cur = E.values();
  std::vector<double> next(cur.size());
  SolveReport report;
  for (int k = 1; k <= config.max_sweeps; ++k) {
    const SweepStats st = engine.Sweep(cur, next, k == 1);
    cur.swap(next);
    report.sweeps = k;
    report.residual = st.residual;
    report.monotone = report.monotone && st.monotone;
    if (config.record_history) {
      report.residuals.push_back(st.residual);
      report.active_cells.push_back(st.active);
    }
    if (st.residual < config.tolerance) {
      report.converged = true;
      break;
    }
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!report.converged) {
    std::ostringstream msg;
    msg << "value iteration did not converge in " << config.max_sweeps
        << " sweeps (residual " << report.residual << ", tolerance " << config.tolerance << ")";
    std::vector<double> history = report.residuals;
    if (history.empty()) history.push_back(report.residual);
    throw SolverNonConvergence(msg.str(), std::move(history));
  }
  return {ScalarField(E.grid_ptr(), std::move(cur), FieldRole::kLdm, E.sentinel()),
          std::move(report)};
}

double FixedPointResidual(const ScalarField& G, const ScalarField& E,
                          const DynamicalSystem& system, double gamma, Interpolation mode,
                          int jobs) {
  const ScalarField tg = LdmBackup(G, E, system, gamma, mode, jobs);
  double r = 0.0;
  for (std::size_t c = 0; c < G.values().size(); ++c) r = std::max(r, std::abs(tg[c] - G[c]));
  return r;
}

nlohmann::json LdmConditionReport::ToJson() const {
  auto list = [](const std::vector<CellViolation>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const CellViolation& x : v) a.push_back({{"cell", x.cell}, {"deficit", x.deficit}});
    return a;
  };
  return {{"slack", slack},
          {"condition1_violations", condition1_violations},
          {"condition2_violations", condition2_violations},
          {"worst_condition1_deficit", worst_condition1},
          {"worst_condition2_deficit", worst_condition2},
          {"condition1_cells", list(condition1_cells)},
          {"condition2_cells", list(condition2_cells)},
          {"ok", ok()}};
}

LdmConditionReport VerifyLdmConditions(const ScalarField& G, const ScalarField& E,
                                       const DynamicalSystem& system, double slack, double gamma,
                                       Interpolation mode, int jobs) {
  if (!G.SameGrid(E)) throw std::invalid_argument("G and E live on different grids");
  jobs = ResolveJobs(jobs);
  const SuccessorStencils succ(G.grid(), system, mode, jobs, false);
  const std::size_t na = G.grid().num_actions();
  std::vector<LdmConditionReport> parts(jobs);
  ParallelFor(G.grid().num_cells(), jobs, [&](std::size_t begin, std::size_t end, int w) {
    LdmConditionReport& r = parts[w];
    std::vector<double> row(na);
    for (std::size_t c = begin; c < end; ++c) {
      const StateStencil st = succ.Stencil(c);
      double cont = G.OffDomainValue();
      if (st.inside) {
        cont = StencilRowMin(st, G.values().data(), na, row);
        if (G.role() != FieldRole::kDensity) cont = std::min(cont, G.OffDomainValue());
      }
      const double d1 = gamma * cont - slack - G[c];
      if (d1 > 0.0) {
        ++r.condition1_violations;
        r.worst_condition1 = std::max(r.worst_condition1, d1);
        if (r.condition1_cells.size() < LdmConditionReport::kMaxListed) r.condition1_cells.push_back({c, d1});
      }
      const double d2 = E[c] - slack - G[c];
      if (d2 > 0.0) {
        ++r.condition2_violations;
        r.worst_condition2 = std::max(r.worst_condition2, d2);
        if (r.condition2_cells.size() < LdmConditionReport::kMaxListed) r.condition2_cells.push_back({c, d2});
      }
    }
  });
  LdmConditionReport out;
  out.slack = slack;
  for (const LdmConditionReport& r : parts) {
    out.condition1_violations += r.condition1_violations;
    out.condition2_violations += r.condition2_violations;
    out.worst_condition1 = std::max(out.worst_condition1, r.worst_condition1);
    out.worst_condition2 = std::max(out.worst_condition2, r.worst_condition2);
    for (const CellViolation& v : r.condition1_cells) {
      if (out.condition1_cells.size() < LdmConditionReport::kMaxListed) out.condition1_cells.push_back(v);
    }
    for (const CellViolation& v : r.condition2_cells) {
      if (out.condition2_cells.size() < LdmConditionReport::kMaxListed) out.condition2_cells.push_back(v);
    }
  }
  return out;
}

}  // namespace ldm
