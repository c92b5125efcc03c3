#include "ldm/systems/fit_dynamics.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ldm {

FittedLinearModel FitLinearDynamics(const TransitionDataset& dataset) {
  const int ds = dataset.state_dim();
  const int da = dataset.action_dim();
  const int p = ds + da;
  const Eigen::Index n = static_cast<Eigen::Index>(dataset.size());
  if (n < p) {
    throw std::invalid_argument("need at least " + std::to_string(p) + " records, have " +
                                std::to_string(n));
  }
  Eigen::MatrixXd X(n, p);
  Eigen::MatrixXd Y(n, ds);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = dataset[static_cast<std::size_t>(i)];
    X.row(i).head(ds) = t.state.transpose();
    X.row(i).tail(da) = t.action.transpose();
    Y.row(i) = t.next_state.transpose();
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    // Columns past the rank in pivot order are the dependent ones.
    const int col = qr.colsPermutation().indices()[qr.rank()];
    const std::string name = col < ds ? "s" + std::to_string(col) : "a" + std::to_string(col - ds);
    throw std::invalid_argument("rank-deficient design: regressor " + name +
                                " is linearly dependent (rank " + std::to_string(qr.rank()) +
                                " of " + std::to_string(p) + ")");
  }
  const Eigen::MatrixXd theta = qr.solve(Y);  // p x ds
  const Eigen::MatrixXd F = theta.topRows(ds).transpose();
  const Eigen::MatrixXd G = theta.bottomRows(da).transpose();
  const Eigen::MatrixXd resid = X * theta - Y;
  FittedLinearModel out;
  out.model = std::make_shared<LinearSystem>(F, G);
  out.residual_rmse = std::sqrt(resid.squaredNorm() / static_cast<double>(n * ds));
  out.num_records = static_cast<std::size_t>(n);
  return out;
}

}  // namespace ldm
