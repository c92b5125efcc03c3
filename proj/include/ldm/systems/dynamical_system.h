#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace ldm {

/// Deterministic discrete-time map s' = f(s, a).
class DynamicalSystem {
 public:
  virtual ~DynamicalSystem() = default;

  virtual int state_dim() const = 0;
  virtual int action_dim() const = 0;
  /// Writes f(state, action) into `next`; must not allocate.
  virtual void Step(std::span<const double> state, std::span<const double> action,
                    std::span<double> next) const = 0;
  virtual nlohmann::json Describe() const = 0;

  Eigen::VectorXd Step(const Eigen::VectorXd& state, const Eigen::VectorXd& action) const;
};

/// s' = F s + G a.
class LinearSystem : public DynamicalSystem {
 public:
  LinearSystem(Eigen::MatrixXd F, Eigen::MatrixXd G);

  int state_dim() const override { return static_cast<int>(F_.rows()); }
  int action_dim() const override { return static_cast<int>(G_.cols()); }
  void Step(std::span<const double> state, std::span<const double> action,
            std::span<double> next) const override;
  using DynamicalSystem::Step;
  nlohmann::json Describe() const override;

  const Eigen::MatrixXd& F() const { return F_; }
  const Eigen::MatrixXd& G() const { return G_; }

 private:
  Eigen::MatrixXd F_;
  Eigen::MatrixXd G_;
};

/// Exact zero-order-hold discretization of the planar spiral
/// A = [[beta, omega], [-omega, beta]], B = [0, 1]^T:
///   F = e^{A dt},  G = A^{-1}(e^{A dt} - I) B.
/// Open-loop it spirals outward for beta > 0.
class LinearSpiralSystem : public LinearSystem {
 public:
  static constexpr double kDefaultBeta = 0.1;
  static constexpr double kDefaultOmega = 1.0;
  static constexpr double kDefaultDt = 0.1;

  LinearSpiralSystem(double beta, double omega, double dt);

  double beta() const { return beta_; }
  double omega() const { return omega_; }
  double dt() const { return dt_; }
  Eigen::Matrix2d ContinuousA() const;
  nlohmann::json Describe() const override;

 private:
  double beta_;
  double omega_;
  double dt_;
};

LinearSpiralSystem BuildLinearSpiral(double beta = LinearSpiralSystem::kDefaultBeta,
                                     double omega = LinearSpiralSystem::kDefaultOmega,
                                     double dt = LinearSpiralSystem::kDefaultDt);

/// f(s, a) = s.
class StaticSystem : public DynamicalSystem {
 public:
  StaticSystem(int state_dim, int action_dim) : state_dim_(state_dim), action_dim_(action_dim) {}
  int state_dim() const override { return state_dim_; }
  int action_dim() const override { return action_dim_; }
  void Step(std::span<const double> state, std::span<const double> action,
            std::span<double> next) const override;
  using DynamicalSystem::Step;
  nlohmann::json Describe() const override;

 private:
  int state_dim_;
  int action_dim_;
};

/// Finite system on states {0..n-1} and actions {0..m-1} given by a
/// successor table; a successor of -1 leaves the state space. Coordinates
/// are the indices themselves, so the matching grid is 1-D with unit
/// spacing.
class FiniteSystem : public DynamicalSystem {
 public:
  FiniteSystem(int num_states, int num_actions, std::vector<int> successors);

  /// Uniformly random successor table (every successor in range).
  static FiniteSystem Random(int num_states, int num_actions, std::uint64_t seed);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  int Successor(int state, int action) const { return successors_[state * num_actions_ + action]; }

  int state_dim() const override { return 1; }
  int action_dim() const override { return 1; }
  void Step(std::span<const double> state, std::span<const double> action,
            std::span<double> next) const override;
  using DynamicalSystem::Step;
  nlohmann::json Describe() const override;

 private:
  int num_states_;
  int num_actions_;
  std::vector<int> successors_;
};

}  // namespace ldm
