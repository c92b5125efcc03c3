#include "ldm/solver/brute_force.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace ldm {

FiniteLdmProblem FiniteLdmProblem::FromGrid(const ScalarField& E, const DynamicalSystem& system) {
  const StateActionGrid& grid = E.grid();
  FiniteLdmProblem p;
  p.num_states = static_cast<int>(grid.num_states());
  p.num_actions = static_cast<int>(grid.num_actions());
  p.energy = E.values();
  p.sentinel = E.sentinel();
  p.successor.resize(grid.num_cells());
  for (std::size_t c = 0; c < grid.num_cells(); ++c) {
    const auto [s, a] = grid.CellToCoords(c);
    const Eigen::VectorXd next = system.Step(s, a);
    const std::span<const double> nx(next.data(), static_cast<std::size_t>(next.size()));
    if (!grid.StateInBounds(nx)) {
      p.successor[c] = -1;
      continue;
    }
    const std::size_t idx = grid.NearestStateIndex(nx);
    const Eigen::VectorXd node = grid.StateNode(idx);
    if ((node - next).cwiseAbs().maxCoeff() > 1e-9) {
      throw std::invalid_argument("successor of cell " + std::to_string(c) +
                                  " is not a grid node; the system is not finite on this grid");
    }
    p.successor[c] = static_cast<int>(idx);
  }
  return p;
}

namespace {

struct Key {
  std::uint32_t cell;
  std::uint32_t t;
  std::uint64_t running;
  bool operator==(const Key& o) const {
    return cell == o.cell && t == o.t && running == o.running;
  }
};

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    std::uint64_t h = k.running * 0x9e3779b97f4a7c15ull;
    h ^= (static_cast<std::uint64_t>(k.cell) << 32 | k.t) + 0xbf58476d1ce4e5b9ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

class Search {
 public:
  Search(const FiniteLdmProblem& p, int horizon, double gamma, std::size_t max_memo)
      : p_(p), T_(horizon), max_memo_(max_memo), discount_(horizon + 2, 1.0) {
    for (int t = 1; t < horizon + 2; ++t) discount_[t] = discount_[t - 1] * gamma;
  }

  // Best achievable max over the rest of the sequence, given the cell at
  // step t and the running max of all terms up to and including step t.
  double Value(int cell, int t, double running) {
    if (t == T_) return running;
    std::uint64_t bits;
    std::memcpy(&bits, &running, sizeof bits);
    const Key key{static_cast<std::uint32_t>(cell), static_cast<std::uint32_t>(t), bits};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    double best;
    const int next = p_.successor[cell];
    if (next < 0) {
      best = std::max(running, discount_[t + 1] * p_.sentinel);
    } else {
      best = std::numeric_limits<double>::infinity();
      for (int a = 0; a < p_.num_actions; ++a) {
        const int c = next * p_.num_actions + a;
        const double term = discount_[t + 1] * p_.energy[c];
        best = std::min(best, Value(c, t + 1, std::max(running, term)));
      }
    }
    if (memo_.size() >= max_memo_) {
      throw std::invalid_argument("brute-force search exceeded its memo cap");
    }
    memo_.emplace(key, best);
    return best;
  }

 private:
  const FiniteLdmProblem& p_;
  int T_;
  std::size_t max_memo_;
  std::vector<double> discount_;
  std::unordered_map<Key, double, KeyHash> memo_;
};

}  // namespace

std::vector<double> BruteForceLdm(const FiniteLdmProblem& problem, int horizon, double gamma,
                                  const BruteForceLimits& limits) {
  const std::size_t cells =
      static_cast<std::size_t>(problem.num_states) * static_cast<std::size_t>(problem.num_actions);
  if (problem.num_states < 1 || problem.num_actions < 1 || problem.successor.size() != cells ||
      problem.energy.size() != cells) {
    throw std::invalid_argument("malformed finite problem");
  }
  if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
  if (cells * (static_cast<std::size_t>(horizon) + 1) > limits.max_work) {
    throw std::invalid_argument("problem too large for brute force (" + std::to_string(cells) +
                                " cells, horizon " + std::to_string(horizon) + ")");
  }
  for (int s : problem.successor) {
    if (s >= problem.num_states) throw std::invalid_argument("successor out of range");
  }
  Search search(problem, horizon, gamma, limits.max_memo);
  std::vector<double> out(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    out[c] = search.Value(static_cast<int>(c), 0, problem.energy[c]);
  }
  return out;
}

int StationaryHorizon(const FiniteLdmProblem& problem, double gamma) {
  const int cells = problem.num_states * problem.num_actions;
  if (gamma >= 1.0) return cells + 1;
  const double e_min = *std::min_element(problem.energy.begin(), problem.energy.end());
  if (!(e_min > 0.0)) {
    throw std::invalid_argument("discounted stationary horizon needs positive energies");
  }
  const double top = std::max(problem.sentinel, e_min);
  const int t = static_cast<int>(std::ceil(std::log(e_min / top) / std::log(gamma))) + 1;
  return std::max(t, 1);
}

}  // namespace ldm
