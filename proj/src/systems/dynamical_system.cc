#include "ldm/systems/dynamical_system.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "ldm/core/random.h"

namespace ldm {

Eigen::VectorXd DynamicalSystem::Step(const Eigen::VectorXd& state,
                                      const Eigen::VectorXd& action) const {
  Eigen::VectorXd next(state_dim());
  Step(std::span<const double>(state.data(), static_cast<std::size_t>(state.size())),
       std::span<const double>(action.data(), static_cast<std::size_t>(action.size())),
       std::span<double>(next.data(), static_cast<std::size_t>(next.size())));
  return next;
}

LinearSystem::LinearSystem(Eigen::MatrixXd F, Eigen::MatrixXd G)
    : F_(std::move(F)), G_(std::move(G)) {
  if (F_.rows() != F_.cols()) throw std::invalid_argument("F must be square");
  if (G_.rows() != F_.rows()) throw std::invalid_argument("G rows must match F");
}

void LinearSystem::Step(std::span<const double> state, std::span<const double> action,
                        std::span<double> next) const {
  const Eigen::Index n = F_.rows();
  const Eigen::Index m = G_.cols();
  for (Eigen::Index i = 0; i < n; ++i) {
    double v = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) v += F_(i, j) * state[j];
    for (Eigen::Index j = 0; j < m; ++j) v += G_(i, j) * action[j];
    next[i] = v;
  }
}

nlohmann::json LinearSystem::Describe() const {
  nlohmann::json f = nlohmann::json::array(), g = nlohmann::json::array();
  for (Eigen::Index i = 0; i < F_.rows(); ++i) {
    nlohmann::json rf = nlohmann::json::array(), rg = nlohmann::json::array();
    for (Eigen::Index j = 0; j < F_.cols(); ++j) rf.push_back(F_(i, j));
    for (Eigen::Index j = 0; j < G_.cols(); ++j) rg.push_back(G_(i, j));
    f.push_back(rf);
    g.push_back(rg);
  }
  return {{"kind", "linear"}, {"F", f}, {"G", g}};
}

namespace {

Eigen::Matrix2d SpiralF(double beta, double omega, double dt) {
  const double g = std::exp(beta * dt);
  const double c = std::cos(omega * dt);
  const double s = std::sin(omega * dt);
  Eigen::Matrix2d F;
  F << g * c, g * s, -g * s, g * c;
  return F;
}

Eigen::MatrixXd SpiralG(double beta, double omega, double dt) {
  Eigen::Matrix2d A;
  A << beta, omega, -omega, beta;
  const Eigen::Matrix2d F = SpiralF(beta, omega, dt);
  const Eigen::Vector2d B(0.0, 1.0);
  return A.inverse() * (F - Eigen::Matrix2d::Identity()) * B;
}

}  // namespace

LinearSpiralSystem::LinearSpiralSystem(double beta, double omega, double dt)
    : LinearSystem(SpiralF(beta, omega, dt), SpiralG(beta, omega, dt)),
      beta_(beta),
      omega_(omega),
      dt_(dt) {
  if (!(beta > 0.0) || !(omega > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("linear spiral needs beta, omega, dt > 0");
  }
}

Eigen::Matrix2d LinearSpiralSystem::ContinuousA() const {
  Eigen::Matrix2d A;
  A << beta_, omega_, -omega_, beta_;
  return A;
}

nlohmann::json LinearSpiralSystem::Describe() const {
  return {{"kind", "linear-spiral"}, {"beta", beta_}, {"omega", omega_}, {"dt", dt_}};
}

LinearSpiralSystem BuildLinearSpiral(double beta, double omega, double dt) {
  return LinearSpiralSystem(beta, omega, dt);
}

void StaticSystem::Step(std::span<const double> state, std::span<const double>,
                        std::span<double> next) const {
  for (int i = 0; i < state_dim_; ++i) next[i] = state[i];
}

nlohmann::json StaticSystem::Describe() const {
  return {{"kind", "static"}, {"state_dim", state_dim_}, {"action_dim", action_dim_}};
}

FiniteSystem::FiniteSystem(int num_states, int num_actions, std::vector<int> successors)
    : num_states_(num_states), num_actions_(num_actions), successors_(std::move(successors)) {
  if (num_states < 1 || num_actions < 1) throw std::invalid_argument("empty finite system");
  if (successors_.size() != static_cast<std::size_t>(num_states * num_actions)) {
    throw std::invalid_argument("successor table size mismatch");
  }
  for (int s : successors_) {
    if (s < -1 || s >= num_states) throw std::invalid_argument("successor out of range");
  }
}

FiniteSystem FiniteSystem::Random(int num_states, int num_actions, std::uint64_t seed) {
  Rng rng = MakeRng(seed, "finite-system");
  std::uniform_int_distribution<int> pick(0, num_states - 1);
  std::vector<int> succ(static_cast<std::size_t>(num_states * num_actions));
  for (int& s : succ) s = pick(rng);
  return FiniteSystem(num_states, num_actions, std::move(succ));
}

void FiniteSystem::Step(std::span<const double> state, std::span<const double> action,
                        std::span<double> next) const {
  const long s = std::lround(state[0]);
  const long a = std::lround(action[0]);
  if (s < 0 || s >= num_states_ || a < 0 || a >= num_actions_) {
    next[0] = -1.0;
    return;
  }
  next[0] = static_cast<double>(successors_[s * num_actions_ + a]);
}

nlohmann::json FiniteSystem::Describe() const {
  return {{"kind", "finite"},
          {"num_states", num_states_},
          {"num_actions", num_actions_},
          {"successors", successors_}};
}

}  // namespace ldm
