#include "ldm/systems/chain.h"

#include <random>
#include <stdexcept>
#include <string>

#include "ldm/core/random.h"

namespace ldm {

ChainSystem BuildChain(int H, int K, double epsilon) {
  if (H < 1) throw std::invalid_argument("chain needs H >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("chain needs epsilon > 0");
  if (K < 1) throw std::invalid_argument("chain needs K >= 1");
  // 1/K <= 2(H+1)eps  <=>  1 <= 2(H+1)eps K
  if (!(1.0 <= 2.0 * (H + 1) * epsilon * K)) {
    throw std::invalid_argument("K=" + std::to_string(K) + " too small: need 1/K <= 2(H+1)epsilon");
  }
  return ChainSystem(H, K, epsilon);
}

double ChainSystem::Density(long s, long a) const {
  const double base = SustainableDensity();
  if (a == -1 && s >= -(H_ - 1) && s <= 0) return base;
  if (a == 1 && s >= 0 && s <= H_ - 1) return base;
  if (s == -H_ && a == 0) return base;
  if (s == H_ && a >= 0 && a <= K_ - 1) return base / K_;
  return 0.0;
}

std::shared_ptr<const StateActionGrid> ChainSystem::MakeGrid() const {
  const int ns = max_state() - min_state() + 1;
  const int na = max_action() - min_action() + 1;
  return std::make_shared<const StateActionGrid>(
      std::vector<GridAxis>{{static_cast<double>(min_state()), static_cast<double>(max_state()), ns}},
      std::vector<GridAxis>{{static_cast<double>(min_action()), static_cast<double>(max_action()), na}});
}

void ChainSystem::Step(std::span<const double> state, std::span<const double> action,
                       std::span<double> next) const {
  next[0] = state[0] + action[0];
}

nlohmann::json ChainSystem::Describe() const {
  return {{"kind", "chain"}, {"H", H_}, {"K", K_}, {"epsilon", epsilon_}};
}

TransitionDataset SampleChainDataset(const ChainSystem& chain, std::size_t n_samples,
                                     std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  std::vector<std::pair<long, long>> pairs;
  std::vector<double> weights;
  for (long s = chain.min_state(); s <= chain.max_state(); ++s) {
    for (long a = chain.min_action(); a <= chain.max_action(); ++a) {
      const double p = chain.Density(s, a);
      if (p > 0.0) {
        pairs.emplace_back(s, a);
        weights.push_back(p);
      }
    }
  }
  TransitionDataset data(1, 1);
  data.SetBounds(*chain.MakeGrid());
  data.policy = chain.Describe().dump();
  data.seed = seed;
  Rng rng = MakeRng(seed, "dataset");
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  for (std::size_t i = 0; i < n_samples; ++i) {
    const auto [s, a] = pairs[pick(rng)];
    Eigen::VectorXd sv(1), av(1);
    sv[0] = static_cast<double>(s);
    av[0] = static_cast<double>(a);
    data.Add({sv, av, chain.Step(sv, av)});
  }
  return data;
}

}  // namespace ldm
