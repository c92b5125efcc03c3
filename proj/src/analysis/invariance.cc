#include "ldm/analysis/invariance.h"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "ldm/core/parallel.h"
#include "ldm/core/stencil_ops.h"
#include "ldm/solver/successor.h"

namespace ldm {

nlohmann::json InvarianceReport::ToJson() const {
  nlohmann::json cells = nlohmann::json::array();
  for (const CellViolation& v : violating_cells) {
    cells.push_back({{"cell", v.cell}, {"deficit", v.deficit}});
  }
  return {{"threshold", threshold},     {"slack", slack},
          {"members", members},         {"violations", violations},
          {"worst_deficit", worst_deficit}, {"invariant", invariant()},
          {"violating_cells", cells}};
}

std::vector<double> SpanningThresholds(const ScalarField& field, int count) {
  if (count < 0) throw std::invalid_argument("threshold count must be >= 0");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : field.values()) {
    if (v >= field.sentinel()) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::vector<double> out;
  if (count == 0 || !(lo <= hi)) return out;
  if (count == 1) return {lo};
  for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * i / (count - 1));
  out.back() = hi;
  return out;
}

InvarianceReport VerifyInvariance(const SublevelSet& set, const DynamicalSystem& system,
                                  double slack, Interpolation mode, int jobs) {
  const ScalarField& field = set.field();
  InvarianceReport out;
  out.threshold = set.threshold();
  out.slack = slack;
  out.members = set.size();
  if (set.empty()) return out;
  jobs = ResolveJobs(jobs);
  const std::size_t na = field.grid().num_actions();
  const std::vector<std::size_t>& members = set.members();
  const SuccessorStencils succ(field.grid(), system, mode, 1, false);
  std::vector<InvarianceReport> parts(jobs);
  ParallelFor(members.size(), jobs, [&](std::size_t begin, std::size_t end, int w) {
    InvarianceReport& r = parts[w];
    std::vector<double> row(na);
    for (std::size_t k = begin; k < end; ++k) {
      const std::size_t c = members[k];
      const StateStencil st = succ.Stencil(c);
      double best = field.OffDomainValue();
      if (st.inside) {
        best = std::min(StencilRowMin(st, field.values().data(), na, row), field.sentinel());
      }
      const double deficit = best - set.threshold() - slack;
      if (deficit > 0.0) {
        ++r.violations;
        r.worst_deficit = std::max(r.worst_deficit, deficit);
        if (r.violating_cells.size() < InvarianceReport::kMaxListed) {
          r.violating_cells.push_back({c, deficit});
        }
      }
    }
  });
  for (const InvarianceReport& r : parts) {
    out.violations += r.violations;
    out.worst_deficit = std::max(out.worst_deficit, r.worst_deficit);
    for (const CellViolation& v : r.violating_cells) {
      if (out.violating_cells.size() < InvarianceReport::kMaxListed) out.violating_cells.push_back(v);
    }
  }
  return out;
}

}  // namespace ldm
