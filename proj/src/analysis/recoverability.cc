#include "ldm/analysis/recoverability.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ldm/core/stencil_ops.h"
#include "ldm/solver/successor.h"

namespace ldm {

nlohmann::json RecoverabilityReport::ToJson() const {
  return {{"R", R},
          {"r", r},
          {"witness_start", witness_start},
          {"witness_path", witness_path},
          {"dp_iterations", dp_iterations},
          {"dp_converged", dp_converged}};
}

RecoverabilityReport ComputeRecoverability(const ScalarField& density,
                                           const DynamicalSystem& system, Interpolation mode,
                                           double tolerance, int max_iterations) {
  if (density.role() != FieldRole::kDensity) {
    throw std::invalid_argument("recoverability needs a density-role field");
  }
  const std::vector<double>& P = density.values();
  const double p_max = *std::max_element(P.begin(), P.end());
  if (!(p_max > 0.0)) throw std::invalid_argument("density is zero everywhere");
  const StateActionGrid& grid = density.grid();
  const std::size_t na = grid.num_actions();
  const std::size_t cells = grid.num_cells();
  const SuccessorStencils succ(grid, system, mode, 1, false);
  std::vector<StateStencil> stencils(cells);
  for (std::size_t c = 0; c < cells; ++c) stencils[c] = succ.Stencil(c);

  RecoverabilityReport out;
  std::vector<double> row(na);
  auto best_next = [&](const std::vector<double>& values, std::size_t c, std::size_t* arg) {
    const StateStencil& st = stencils[c];
    if (!st.inside) return 0.0;
    StencilRow(st, values.data(), na, row.data());
    return RowMax(row.data(), na, arg);
  };

  // One-step ratio r.
  out.r = 0.0;
  for (std::size_t c = 0; c < cells; ++c) {
    if (P[c] > 0.0) out.r = std::max(out.r, best_next(P, c, nullptr) / P[c]);
  }

  std::vector<double> M = P;
  std::vector<double> next(cells);
  for (int it = 1; it <= max_iterations; ++it) {
    double change = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      next[c] = std::max(P[c], best_next(M, c, nullptr));
      change = std::max(change, next[c] - M[c]);
    }
    M.swap(next);
    out.dp_iterations = it;
    if (change <= tolerance * p_max) {
      out.dp_converged = true;
      break;
    }
  }

  out.R = 1.0;
  for (std::size_t c = 0; c < cells; ++c) {
    if (P[c] > 0.0 && M[c] / P[c] > out.R) {
      out.R = M[c] / P[c];
      out.witness_start = c;
    }
  }
  // Follow the best continuation until the reachable maximum is attained.
  std::size_t c = out.witness_start;
  out.witness_path.push_back(c);
  for (int step = 0; step < 1000 && M[c] > P[c] * (1.0 + 1e-12); ++step) {
    const StateStencil& st = stencils[c];
    if (!st.inside) break;
    std::size_t a = 0;
    best_next(M, c, &a);
    const auto [s, act] = grid.CellToCoords(c);
    const Eigen::VectorXd nx = system.Step(s, act);
    c = grid.CellIndex(
        grid.NearestStateIndex(std::span<const double>(nx.data(), static_cast<std::size_t>(nx.size()))),
        a);
    out.witness_path.push_back(c);
  }
  out.max_reachable = std::move(M);
  return out;
}

}  // namespace ldm
