#pragma once

#include <cstdint>
#include <memory>

#include "ldm/core/dataset.h"
#include "ldm/core/grid.h"
#include "ldm/systems/dynamical_system.h"

namespace ldm {

/// Integer chain f(s, a) = s + a with reward r(s, a) = a and s0 = 0, plus
/// the data distribution that defeats density-thresholded MPC:
///
///   P(s, -1) = 1 / (2(H+1))      for s in {-(H-1), ..., 0}
///   P(s,  1) = 1 / (2(H+1))      for s in {0, ..., H-1}
///   P(-H, 0) = 1 / (2(H+1))
///   P(H,  k) = 1 / (2(H+1)K)     for k in {0, ..., K-1}
///
/// and zero elsewhere. States cover {-H, ..., H+K-1}; actions {-1, ..., K-1}.
class ChainSystem : public DynamicalSystem {
 public:
  int horizon() const { return H_; }
  int k() const { return K_; }
  double epsilon() const { return epsilon_; }

  int min_state() const { return -H_; }
  int max_state() const { return H_ + K_ - 1; }
  int min_action() const { return -1; }
  int max_action() const { return K_ - 1; }

  /// Exact table value; zero for anything not listed above.
  double Density(long s, long a) const;
  /// The level every trajectory can sustain: 1 / (2(H+1)).
  double SustainableDensity() const { return 1.0 / (2.0 * (H_ + 1)); }
  double Reward(double, double a) const { return a; }

  /// Integer grid over the full state and action sets (unit spacing).
  std::shared_ptr<const StateActionGrid> MakeGrid() const;

  int state_dim() const override { return 1; }
  int action_dim() const override { return 1; }
  void Step(std::span<const double> state, std::span<const double> action,
            std::span<double> next) const override;
  using DynamicalSystem::Step;
  nlohmann::json Describe() const override;

 private:
  friend ChainSystem BuildChain(int H, int K, double epsilon);

  ChainSystem(int H, int K, double epsilon) : H_(H), K_(K), epsilon_(epsilon) {}

  int H_;
  int K_;
  double epsilon_;
};

/// Throws std::invalid_argument unless H >= 1, epsilon > 0 and
/// 1/K <= 2(H+1) epsilon.
ChainSystem BuildChain(int H, int K, double epsilon);

/// Draws `n_samples` (s, a) pairs from the chain's density table (every
/// drawn pair has P > 0) with s' = s + a. Uses the "dataset" sub-stream.
TransitionDataset SampleChainDataset(const ChainSystem& chain, std::size_t n_samples,
                                     std::uint64_t seed);

}  // namespace ldm
