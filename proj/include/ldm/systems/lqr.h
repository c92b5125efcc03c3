#pragma once

#include <Eigen/Dense>

#include "ldm/systems/dynamical_system.h"

namespace ldm {

/// Infinite-horizon discrete LQR: u = -gain * s.
struct LqrController {
  Eigen::MatrixXd gain;
  Eigen::MatrixXd riccati;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
  int iterations{0};

  Eigen::VectorXd Action(const Eigen::VectorXd& state) const { return -gain * state; }
  /// F - G * gain.
  Eigen::MatrixXd ClosedLoop(const LinearSystem& system) const;
};

/// Iterates P <- Q + F'PF - F'PG (R + G'PG)^{-1} G'PF from P = Q until the
/// max-abs change is below `tolerance`. Throws std::runtime_error when the
/// iteration diverges or does not settle within `max_iterations`.
LqrController SolveLqr(const Eigen::MatrixXd& F, const Eigen::MatrixXd& G,
                       const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                       double tolerance = 1e-10, int max_iterations = 100000);

LqrController SolveLqr(const LinearSystem& system, const Eigen::MatrixXd& Q,
                       const Eigen::MatrixXd& R, double tolerance = 1e-10,
                       int max_iterations = 100000);

/// Default case-(b) controller for a spiral: Q = I, R = 1.
LqrController DefaultSpiralLqr(const LinearSpiralSystem& system);

double SpectralRadius(const Eigen::MatrixXd& M);

}  // namespace ldm
