#include "ldm/solver/fitted.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace ldm {

Evaluator FieldEvaluator(const ScalarField& field, Interpolation mode) {
  auto f = std::make_shared<const ScalarField>(field);
  return [f, mode](std::span<const double> s, std::span<const double> a) {
    return f->Lookup(s, a, mode);
  };
}

RbfBasis::RbfBasis(const StateActionGrid& bounds, int num_centers)
    : dim_(bounds.state_dim() + bounds.action_dim()) {
  if (num_centers < 1) throw std::invalid_argument("RBF basis needs at least one center");
  std::vector<GridAxis> axes = bounds.state_axes();
  axes.insert(axes.end(), bounds.action_axes().begin(), bounds.action_axes().end());
  int base = static_cast<int>(std::floor(std::pow(num_centers, 1.0 / dim_) + 1e-9));
  base = std::max(base, 1);
  lattice_.assign(dim_, base);
  long total = 1;
  for (int c : lattice_) total *= c;
  for (int d = 0; d < dim_; ++d) {
    if (total / lattice_[d] * (lattice_[d] + 1) <= num_centers) {
      total = total / lattice_[d] * (lattice_[d] + 1);
      ++lattice_[d];
    }
  }
  for (int d = 0; d < dim_; ++d) {
    if (axes[d].count <= 1) lattice_[d] = 1;
  }
  total = 1;
  for (int c : lattice_) total *= c;
  centers_.resize(total, dim_);
  inv_width_.resize(dim_);
  for (int d = 0; d < dim_; ++d) {
    const double span = axes[d].hi - axes[d].lo;
    inv_width_[d] = lattice_[d] > 1 ? (lattice_[d] - 1) / span : 0.0;
  }
  std::vector<int> idx(dim_, 0);
  for (long r = 0; r < total; ++r) {
    for (int d = 0; d < dim_; ++d) {
      centers_(r, d) = lattice_[d] > 1
                           ? axes[d].lo + (axes[d].hi - axes[d].lo) * idx[d] / (lattice_[d] - 1)
                           : axes[d].lo;
    }
    for (int d = dim_ - 1; d >= 0; --d) {
      if (++idx[d] < lattice_[d]) break;
      idx[d] = 0;
    }
  }
}

void RbfBasis::Features(std::span<const double> state, std::span<const double> action,
                        double* out) const {
  const int ds = static_cast<int>(state.size());
  const Eigen::Index m = centers_.rows();
  for (Eigen::Index r = 0; r < m; ++r) {
    double q = 0.0;
    for (int d = 0; d < dim_; ++d) {
      const double x = d < ds ? state[d] : action[d - ds];
      const double z = (x - centers_(r, d)) * inv_width_[d];
      q += z * z;
    }
    out[r] = std::exp(-0.5 * q);
  }
  for (int d = 0; d < dim_; ++d) out[m + d] = d < ds ? state[d] : action[d - ds];
  out[m + dim_] = 1.0;
}

nlohmann::json RbfBasis::Describe() const {
  return {{"kind", "rbf"}, {"centers", centers_.rows()}, {"lattice", lattice_},
          {"linear_terms", dim_}, {"bias", true}};
}

void FittedConfig::Validate() const {
  if (iterations < 0) throw std::invalid_argument("fitted.iterations must be >= 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("fitted.gamma must lie in (0, 1]");
  if (!(ridge >= 0.0)) throw std::invalid_argument("fitted.ridge must be >= 0");
}

nlohmann::json FittedConfig::ToJson() const {
  return {{"iterations", iterations}, {"gamma", gamma}, {"ridge", ridge}};
}

FittedConfig FittedConfig::FromJson(const nlohmann::json& j) {
  FittedConfig c;
  c.iterations = j.value("iterations", c.iterations);
  c.gamma = j.value("gamma", c.gamma);
  c.ridge = j.value("ridge", c.ridge);
  c.Validate();
  return c;
}

nlohmann::json FittedLdmRun::ToJson() const {
  return {{"iterations", static_cast<int>(iterates.size()) - 1},
          {"fit_rmse", fit_rmse},
          {"epsilon_ls_proxy", epsilon_ls_proxy}};
}

namespace {

std::span<const double> Span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

std::vector<double> ActionNodes(const StateActionGrid& bounds) {
  const int da = bounds.action_dim();
  std::vector<double> out(bounds.num_actions() * da);
  for (std::size_t j = 0; j < bounds.num_actions(); ++j) {
    bounds.ActionNodeInto(j, std::span<double>(out.data() + j * da, da));
  }
  return out;
}

// Running mean that returns the common value exactly when all inputs agree.
struct Mean {
  double value{0.0};
  std::size_t count{0};
  void Add(double x) {
    ++count;
    value = count == 1 ? x : value + (x - value) / static_cast<double>(count);
  }
};

}  // namespace

double ContinuationMin(const Evaluator& G, std::span<const double> next_state,
                       const StateActionGrid& bounds, double sentinel) {
  if (!bounds.StateInBounds(next_state)) return sentinel;
  const int da = bounds.action_dim();
  std::vector<double> a(da);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < bounds.num_actions(); ++j) {
    bounds.ActionNodeInto(j, a);
    best = std::min(best, G(next_state, a));
  }
  return best;
}

FittedLdmRun FittedLdmIteration(const TransitionDataset& dataset, const Evaluator& energy,
                                const StateActionGrid& bounds,
                                std::shared_ptr<const FeatureBasis> basis,
                                const FittedConfig& config, double sentinel) {
  config.Validate();
  if (dataset.empty()) throw std::invalid_argument("fitted iteration needs data");
  const Eigen::Index n = static_cast<Eigen::Index>(dataset.size());
  const int p = basis->size();
  const std::size_t na = bounds.num_actions();
  const int da = bounds.action_dim();
  const std::vector<double> actions = ActionNodes(bounds);

  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd e(n);
  // Features of (s'_i, a_j) for every record and grid action; rows of
  // records whose s' leaves the grid are unused.
  Eigen::MatrixXd Xn(n * static_cast<Eigen::Index>(na), p);
  std::vector<char> inside(n);
  std::vector<double> row(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = dataset[static_cast<std::size_t>(i)];
    basis->Features(Span(t.state), Span(t.action), row.data());
    for (int k = 0; k < p; ++k) X(i, k) = row[k];
    e[i] = energy(Span(t.state), Span(t.action));
    inside[i] = bounds.StateInBounds(Span(t.next_state));
    for (std::size_t j = 0; j < na && inside[i]; ++j) {
      basis->Features(Span(t.next_state), std::span<const double>(actions.data() + j * da, da),
                      row.data());
      for (int k = 0; k < p; ++k) Xn(i * static_cast<Eigen::Index>(na) + j, k) = row[k];
    }
  }
  Eigen::MatrixXd A = X.transpose() * X;
  A.diagonal().array() += config.ridge;
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("fitted iteration: normal equations are singular despite ridge " +
                             std::to_string(config.ridge));
  }

  auto frozen_bounds = std::make_shared<const StateActionGrid>(bounds);
  FittedLdmRun run;
  run.iterates.push_back(energy);
  Eigen::VectorXd w;
  for (int k = 1; k <= config.iterations; ++k) {
    Eigen::VectorXd y(n);
    Eigen::VectorXd next_values;
    if (k > 1) next_values = Xn * w;
    for (Eigen::Index i = 0; i < n; ++i) {
      double cont = sentinel;
      if (inside[i]) {
        if (k == 1) {
          cont = ContinuationMin(energy, Span(dataset[static_cast<std::size_t>(i)].next_state),
                                 bounds, sentinel);
        } else {
          cont = next_values.segment(i * static_cast<Eigen::Index>(na),
                                     static_cast<Eigen::Index>(na)).minCoeff();
        }
      }
      y[i] = std::max(e[i], config.gamma * cont);
    }
    w = llt.solve(X.transpose() * y);
    if (!w.allFinite()) throw std::runtime_error("fitted iteration produced non-finite weights");
    const double rmse = std::sqrt((X * w - y).squaredNorm() / static_cast<double>(n));
    run.fit_rmse.push_back(rmse);
    run.iterates.push_back([basis, w, frozen_bounds, sentinel](std::span<const double> s,
                                                               std::span<const double> a) {
      if (!frozen_bounds->StateInBounds(s)) return sentinel;
      std::vector<double> f(basis->size());
      basis->Features(s, a, f.data());
      return Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()))
          .dot(w);
    });
  }
  run.epsilon_ls_proxy =
      run.fit_rmse.empty() ? 0.0 : *std::max_element(run.fit_rmse.begin(), run.fit_rmse.end());
  return run;
}

FittedLdmRun FittedLdmIterationOneHot(const TransitionDataset& dataset, const Evaluator& energy,
                                      std::shared_ptr<const StateActionGrid> grid,
                                      const FittedConfig& config, double sentinel) {
  config.Validate();
  if (dataset.empty()) throw std::invalid_argument("fitted iteration needs data");
  const std::size_t n = dataset.size();
  const std::size_t na = grid->num_actions();
  std::vector<std::size_t> cell(n);
  std::vector<double> e(n);
  std::vector<long> next_state(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Transition& t = dataset[i];
    cell[i] = grid->CoordsToCell(t.state, t.action);
    e[i] = energy(Span(t.state), Span(t.action));
    next_state[i] = grid->StateInBounds(Span(t.next_state))
                        ? static_cast<long>(grid->NearestStateIndex(Span(t.next_state)))
                        : -1;
  }
  auto table_evaluator = [grid, sentinel](std::shared_ptr<const std::vector<double>> v) {
    return Evaluator([grid, sentinel, v](std::span<const double> s, std::span<const double> a) {
      if (!grid->StateInBounds(s) || !grid->ActionInBounds(a)) return sentinel;
      return (*v)[grid->CellIndex(grid->NearestStateIndex(s), grid->NearestActionIndex(a))];
    });
  };
  FittedLdmRun run;
  run.iterates.push_back(energy);
  std::shared_ptr<const std::vector<double>> prev;
  for (int k = 1; k <= config.iterations; ++k) {
    std::vector<Mean> means(grid->num_cells());
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double cont = sentinel;
      if (next_state[i] >= 0) {
        if (k == 1) {
          cont = ContinuationMin(energy, Span(dataset[i].next_state), *grid, sentinel);
        } else {
          const double* r = prev->data() + static_cast<std::size_t>(next_state[i]) * na;
          cont = *std::min_element(r, r + na);
        }
      }
      y[i] = std::max(e[i], config.gamma * cont);
      means[cell[i]].Add(y[i]);
    }
    auto values = std::make_shared<std::vector<double>>(grid->num_cells(), sentinel);
    for (std::size_t c = 0; c < means.size(); ++c) {
      if (means[c].count > 0) (*values)[c] = means[c].value;
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = (*values)[cell[i]] - y[i];
      sq += r * r;
    }
    run.fit_rmse.push_back(std::sqrt(sq / static_cast<double>(n)));
    prev = values;
    run.iterates.push_back(table_evaluator(values));
  }
  run.epsilon_ls_proxy =
      run.fit_rmse.empty() ? 0.0 : *std::max_element(run.fit_rmse.begin(), run.fit_rmse.end());
  return run;
}

std::vector<double> SampledExpectedBackup(const Evaluator& G, const Evaluator& energy,
                                          const TransitionDataset& dataset,
                                          const StateActionGrid& bounds, double gamma,
                                          double sentinel) {
  std::map<std::vector<double>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Transition& t = dataset[i];
    std::vector<double> key(t.state.data(), t.state.data() + t.state.size());
    key.insert(key.end(), t.action.data(), t.action.data() + t.action.size());
    groups[key].push_back(i);
  }
  std::vector<double> out(dataset.size());
  for (const auto& [key, members] : groups) {
    const Transition& first = dataset[members.front()];
    const double e = energy(Span(first.state), Span(first.action));
    Mean m;
    for (std::size_t i : members) {
      m.Add(std::max(e, gamma * ContinuationMin(G, Span(dataset[i].next_state), bounds, sentinel)));
    }
    for (std::size_t i : members) out[i] = m.value;
  }
  return out;
}

}  // namespace ldm
