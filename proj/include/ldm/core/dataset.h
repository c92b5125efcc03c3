#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ldm/core/grid.h"

namespace ldm {

struct Transition {
  Eigen::VectorXd state;
  Eigen::VectorXd action;
  Eigen::VectorXd next_state;
};

/// (s, a, s') records in insertion order. When bounds are attached, records
/// whose state or action lies outside them are rejected.
class TransitionDataset {
 public:
  TransitionDataset(int state_dim, int action_dim);

  void SetBounds(const StateActionGrid& grid);
  /// Returns false (and stores nothing) when the record is out of bounds.
  bool Add(Transition record);

  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const Transition& operator[](std::size_t i) const { return records_[i]; }
  const std::vector<Transition>& records() const { return records_; }
  std::size_t rejected() const { return rejected_; }

  std::string policy;
  std::uint64_t seed{0};

  /// CSV with header `s0..,a0..,sp0..`, 17 significant digits.
  void WriteCsv(std::ostream& out) const;
  void WriteCsv(const std::string& path) const;
  /// Dimensions are inferred from the header; `bounds` may be null.
  static TransitionDataset ReadCsv(std::istream& in, const StateActionGrid* bounds = nullptr);
  static TransitionDataset ReadCsv(const std::string& path,
                                   const StateActionGrid* bounds = nullptr);

 private:
  int state_dim_;
  int action_dim_;
  bool has_bounds_{false};
  std::vector<GridAxis> state_bounds_;
  std::vector<GridAxis> action_bounds_;
  std::vector<Transition> records_;
  std::size_t rejected_{0};
};

}  // namespace ldm
