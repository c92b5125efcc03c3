#include "ldm/analysis/clf.h"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ldm {

nlohmann::json ClfReport::ToJson() const {
  return {{"w_at_equilibrium", w_at_equilibrium},
          {"nonpositive_states", nonpositive_states},
          {"condition1_violations", condition1_violations},
          {"worst_condition1_deficit", worst_condition1},
          {"slack", slack},
          {"ok", ok()}};
}

ClfResult ExtractClf(const ScalarField& G, const Eigen::VectorXd& s_e, const Eigen::VectorXd& a_e,
                     double tolerance) {
  const StateActionGrid& grid = G.grid();
  const std::size_t eq = grid.CoordsToCell(s_e, a_e);
  const std::vector<double>& v = G.values();
  const std::size_t argmin = static_cast<std::size_t>(
      std::min_element(v.begin(), v.end()) - v.begin());
  if (v[eq] > v[argmin] + tolerance) {
    const auto [s, a] = grid.CellToCoords(argmin);
    std::ostringstream msg;
    msg << "G is not minimal at the declared equilibrium (G = " << v[eq]
        << "); its minimum " << v[argmin] << " is at s = [" << s.transpose() << "], a = ["
        << a.transpose() << "]";
    throw std::invalid_argument(msg.str());
  }
  const double g_e = v[eq];
  const std::size_t na = grid.num_actions();
  std::vector<double> w(grid.num_states());
  for (std::size_t s = 0; s < grid.num_states(); ++s) {
    const double* row = v.data() + s * na;
    w[s] = *std::min_element(row, row + na) - g_e;
  }
  auto state_grid = std::make_shared<const StateActionGrid>(grid.state_axes(),
                                                            std::vector<GridAxis>{}, true);
  return {ScalarField(state_grid, std::move(w), FieldRole::kGeneric, G.sentinel() - g_e),
          grid.StateOfCell(eq), g_e};
}

ClfReport VerifyClf(const ClfResult& clf, const DynamicalSystem& system,
                    const StateActionGrid& action_grid, double slack) {
  const ScalarField& W = clf.W;
  const StateActionGrid& grid = W.grid();
  ClfReport out;
  out.slack = slack;
  out.w_at_equilibrium = W[clf.equilibrium_state];
  const int ds = grid.state_dim();
  const int da = action_grid.action_dim();
  std::vector<double> s(ds), a(da), none;
  Eigen::VectorXd sv(ds), av(da);
  for (std::size_t i = 0; i < grid.num_states(); ++i) {
    if (i != clf.equilibrium_state && !(W[i] > 0.0)) ++out.nonpositive_states;
    grid.StateNodeInto(i, s);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < action_grid.num_actions(); ++j) {
      action_grid.ActionNodeInto(j, a);
      for (int d = 0; d < ds; ++d) sv[d] = s[d];
      for (int d = 0; d < da; ++d) av[d] = a[d];
      const Eigen::VectorXd nx = system.Step(sv, av);
      best = std::min(best, W.Lookup(std::span<const double>(nx.data(), ds), none));
    }
    const double deficit = best - W[i] - slack;
    if (deficit > 0.0) {
      ++out.condition1_violations;
      out.worst_condition1 = std::max(out.worst_condition1, deficit);
    }
  }
  return out;
}

}  // namespace ldm
