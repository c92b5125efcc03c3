#include "ldm/systems/lqr.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace ldm {

Eigen::MatrixXd LqrController::ClosedLoop(const LinearSystem& system) const {
  return system.F() - system.G() * gain;
}

LqrController SolveLqr(const Eigen::MatrixXd& F, const Eigen::MatrixXd& G,
                       const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                       double tolerance, int max_iterations) {
  if (Q.rows() != F.rows() || Q.cols() != F.cols()) throw std::invalid_argument("Q shape mismatch");
  if (R.rows() != G.cols() || R.cols() != G.cols()) throw std::invalid_argument("R shape mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> qe(Q);
  if (qe.eigenvalues().minCoeff() < -1e-12) throw std::invalid_argument("Q must be PSD");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> re(R);
  if (re.eigenvalues().minCoeff() <= 0.0) throw std::invalid_argument("R must be positive definite");

  const Eigen::MatrixXd Ft = F.transpose();
  const Eigen::MatrixXd Gt = G.transpose();
  Eigen::MatrixXd P = Q;
  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::MatrixXd S = R + Gt * P * G;
    const Eigen::MatrixXd K = S.ldlt().solve(Gt * P * F);
    Eigen::MatrixXd next = Q + Ft * P * F - Ft * P * G * K;
    next = 0.5 * (next + next.transpose());
    if (!next.allFinite()) throw std::runtime_error("Riccati iteration diverged");
    const double diff = (next - P).cwiseAbs().maxCoeff();
    P = std::move(next);
    if (diff < tolerance) {
      LqrController c;
      c.riccati = P;
      c.gain = (R + Gt * P * G).ldlt().solve(Gt * P * F);
      c.Q = Q;
      c.R = R;
      c.iterations = it;
      return c;
    }
  }
  throw std::runtime_error("Riccati iteration did not converge in " +
                           std::to_string(max_iterations) + " iterations");
}

LqrController SolveLqr(const LinearSystem& system, const Eigen::MatrixXd& Q,
                       const Eigen::MatrixXd& R, double tolerance, int max_iterations) {
  return SolveLqr(system.F(), system.G(), Q, R, tolerance, max_iterations);
}

LqrController DefaultSpiralLqr(const LinearSpiralSystem& system) {
  return SolveLqr(system, Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(1, 1));
}

double SpectralRadius(const Eigen::MatrixXd& M) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace ldm
