#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "ldm/core/grid.h"

namespace ldm {

/// out[a] = sum_i w_i * values[node_i * na + a] for every grid action a,
/// accumulated in stencil order starting from 0. Every interpolated lookup
/// goes through this so solver and verifiers agree bit for bit.
inline void StencilRow(const StateStencil& st, const double* values, std::size_t na,
                       double* out) {
  const double* g0 = values + st.nodes[0] * na;
  const double w0 = st.weights[0];
  for (std::size_t a = 0; a < na; ++a) out[a] = w0 * g0[a];
  for (int i = 1; i < st.size; ++i) {
    const double* gi = values + st.nodes[i] * na;
    const double wi = st.weights[i];
    for (std::size_t a = 0; a < na; ++a) out[a] += wi * gi[a];
  }
}

/// Minimum of a row; ties resolve to the lowest index.
inline double RowMin(const double* row, std::size_t n, std::size_t* arg = nullptr) {
  double best = row[0];
  std::size_t k = 0;
  for (std::size_t a = 1; a < n; ++a) {
    if (row[a] < best) {
      best = row[a];
      k = a;
    }
  }
  if (arg) *arg = k;
  return best;
}

inline double RowMax(const double* row, std::size_t n, std::size_t* arg = nullptr) {
  double best = row[0];
  std::size_t k = 0;
  for (std::size_t a = 1; a < n; ++a) {
    if (row[a] > best) {
      best = row[a];
      k = a;
    }
  }
  if (arg) *arg = k;
  return best;
}

/// min_a of the StencilRow values, without materializing the row. Same
/// per-action rounding as StencilRow.
inline double StencilRowMin(const StateStencil& st, const double* values, std::size_t na,
                            std::vector<double>& scratch) {
  using Row = Eigen::Map<const Eigen::ArrayXd>;
  const Eigen::Index n = static_cast<Eigen::Index>(na);
  auto g = [&](int i) { return Row(values + st.nodes[i] * na, n); };
  const auto& w = st.weights;
  switch (st.size) {
    case 1:
      return (w[0] * g(0)).minCoeff();
    case 2:
      return (w[0] * g(0) + w[1] * g(1)).minCoeff();
    case 4:
      return (w[0] * g(0) + w[1] * g(1) + w[2] * g(2) + w[3] * g(3)).minCoeff();
    default:
      scratch.resize(na);
      StencilRow(st, values, na, scratch.data());
      return RowMin(scratch.data(), na);
  }
}

}  // namespace ldm
