#include "ldm/density/density.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ldm {

std::string ToString(DensityEstimator e) {
  switch (e) {
    case DensityEstimator::kHistogram: return "histogram";
    case DensityEstimator::kGaussianKde: return "gaussian-kde";
    case DensityEstimator::kAnalytic: return "analytic";
  }
  return "unknown";
}

DensityEstimator DensityEstimatorFromString(const std::string& name) {
  if (name == "histogram") return DensityEstimator::kHistogram;
  if (name == "gaussian-kde") return DensityEstimator::kGaussianKde;
  if (name == "analytic") return DensityEstimator::kAnalytic;
  throw std::invalid_argument("unknown density estimator '" + name + "'");
}

nlohmann::json DensityConfig::ToJson() const {
  return {{"estimator", ToString(estimator)},
          {"bandwidth", bandwidth > 0.0 ? nlohmann::json(bandwidth) : nlohmann::json("scott")},
          {"floor", floor}};
}

DensityConfig DensityConfig::FromJson(const nlohmann::json& j) {
  DensityConfig c;
  if (j.contains("estimator")) c.estimator = DensityEstimatorFromString(j.at("estimator"));
  if (j.contains("bandwidth") && j.at("bandwidth").is_number()) {
    c.bandwidth = j.at("bandwidth").get<double>();
    if (c.bandwidth <= 0.0) throw std::invalid_argument("bandwidth must be > 0");
  }
  c.floor = j.value("floor", kDefaultDensityFloor);
  if (!(c.floor > 0.0)) throw std::invalid_argument("density floor must be > 0");
  return c;
}

namespace {

void CheckDims(const TransitionDataset& dataset, const StateActionGrid& grid) {
  if (dataset.empty()) throw std::invalid_argument("cannot estimate a density from an empty dataset");
  if (dataset.state_dim() != grid.state_dim() || dataset.action_dim() != grid.action_dim()) {
    throw std::invalid_argument("dataset dimensions do not match the grid");
  }
}

ScalarField Histogram(const TransitionDataset& dataset,
                      std::shared_ptr<const StateActionGrid> grid) {
  std::vector<double> counts(grid->num_cells(), 0.0);
  std::size_t used = 0;
  for (const Transition& t : dataset.records()) {
    if (!grid->StateInBounds({t.state.data(), static_cast<std::size_t>(t.state.size())}) ||
        !grid->ActionInBounds({t.action.data(), static_cast<std::size_t>(t.action.size())})) {
      continue;
    }
    counts[grid->CoordsToCell(t.state, t.action)] += 1.0;
    ++used;
  }
  if (used == 0) throw std::invalid_argument("no dataset record lies inside the grid");
  const double inv = 1.0 / static_cast<double>(used);
  for (double& c : counts) c *= inv;
  return ScalarField(std::move(grid), std::move(counts), FieldRole::kDensity, 0.0);
}

// Truncating the kernel at 6 bandwidths loses < 2e-9 of each sample's mass.
constexpr double kKernelCutoff = 6.0;

ScalarField Kde(const TransitionDataset& dataset, std::shared_ptr<const StateActionGrid> grid,
                const Eigen::VectorXd& h) {
  const int ds = grid->state_dim();
  const int d = ds + grid->action_dim();
  std::vector<GridAxis> axes = grid->state_axes();
  axes.insert(axes.end(), grid->action_axes().begin(), grid->action_axes().end());
  std::vector<std::size_t> strides(d, 1);
  for (int i = d - 2; i >= 0; --i) strides[i] = strides[i + 1] * axes[i + 1].count;

  double norm = 1.0 / static_cast<double>(dataset.size());
  for (int j = 0; j < d; ++j) norm /= h[j] * std::sqrt(2.0 * std::numbers::pi);

  std::vector<double> values(grid->num_cells(), 0.0);
  std::vector<int> lo(d), hi(d), idx(d);
  std::vector<std::vector<double>> kern(d);
  for (const Transition& t : dataset.records()) {
    bool empty = false;
    for (int j = 0; j < d; ++j) {
      const double x = j < ds ? t.state[j] : t.action[j - ds];
      const GridAxis& ax = axes[j];
      kern[j].clear();
      if (ax.count == 1) {
        lo[j] = hi[j] = 0;
        kern[j].push_back(1.0);
        continue;
      }
      const double step = ax.spacing();
      lo[j] = std::max(0, static_cast<int>(std::ceil((x - kKernelCutoff * h[j] - ax.lo) / step)));
      hi[j] = std::min(ax.count - 1,
                       static_cast<int>(std::floor((x + kKernelCutoff * h[j] - ax.lo) / step)));
      if (lo[j] > hi[j]) {
        empty = true;
        break;
      }
      for (int i = lo[j]; i <= hi[j]; ++i) {
        const double z = (ax.node(i) - x) / h[j];
        kern[j].push_back(std::exp(-0.5 * z * z));
      }
    }
    if (empty) continue;
    for (int j = 0; j < d; ++j) idx[j] = lo[j];
    for (;;) {
      double w = norm;
      std::size_t cell = 0;
      for (int j = 0; j < d; ++j) {
        w *= kern[j][idx[j] - lo[j]];
        cell += static_cast<std::size_t>(idx[j]) * strides[j];
      }
      values[cell] += w;
      int j = d - 1;
      while (j >= 0 && ++idx[j] > hi[j]) {
        idx[j] = lo[j];
        --j;
      }
      if (j < 0) break;
    }
  }
  return ScalarField(std::move(grid), std::move(values), FieldRole::kDensity, 0.0);
}

}  // namespace

Eigen::VectorXd ScottBandwidth(const TransitionDataset& dataset) {
  if (dataset.empty()) throw std::invalid_argument("cannot estimate a density from an empty dataset");
  const int ds = dataset.state_dim();
  const int d = ds + dataset.action_dim();
  const double n = static_cast<double>(dataset.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(d);
  for (const Transition& t : dataset.records()) {
    for (int j = 0; j < d; ++j) {
      const double x = j < ds ? t.state[j] : t.action[j - ds];
      mean[j] += x;
      sq[j] += x * x;
    }
  }
  mean /= n;
  Eigen::VectorXd h(d);
  const double factor = std::pow(n, -1.0 / (d + 4));
  for (int j = 0; j < d; ++j) {
    const double var = n > 1 ? std::max(0.0, (sq[j] - n * mean[j] * mean[j]) / (n - 1)) : 0.0;
    if (!(var > 0.0)) {
      throw std::invalid_argument("Scott bandwidth undefined: dimension " + std::to_string(j) +
                                  " has zero sample variance");
    }
    h[j] = factor * std::sqrt(var);
  }
  return h;
}

ScalarField EstimateDensity(const TransitionDataset& dataset,
                            std::shared_ptr<const StateActionGrid> grid,
                            const DensityConfig& config) {
  CheckDims(dataset, *grid);
  switch (config.estimator) {
    case DensityEstimator::kHistogram:
      return Histogram(dataset, std::move(grid));
    case DensityEstimator::kGaussianKde: {
      const int d = grid->state_dim() + grid->action_dim();
      const Eigen::VectorXd h = config.bandwidth > 0.0
                                    ? Eigen::VectorXd::Constant(d, config.bandwidth)
                                    : ScottBandwidth(dataset);
      return Kde(dataset, std::move(grid), h);
    }
    case DensityEstimator::kAnalytic:
      break;
  }
  throw std::invalid_argument("the analytic estimator needs a law, not a dataset");
}

std::string ToString(AnalyticDensity::Kind kind) {
  switch (kind) {
    case AnalyticDensity::Kind::kZeroMeanGaussian: return "zero-mean-gaussian";
    case AnalyticDensity::Kind::kLqrMeanGaussian: return "lqr-mean-gaussian";
    case AnalyticDensity::Kind::kToric: return "toric";
    case AnalyticDensity::Kind::kChainTable: return "chain-table";
  }
  return "unknown";
}

AnalyticDensity::AnalyticDensity(const DataPolicy& policy, const StateActionGrid& bounds)
    : policy_(policy), state_volume_(bounds.StateVolume()) {
  switch (policy.kind) {
    case DataPolicy::Kind::kZeroMeanGaussian: kind_ = Kind::kZeroMeanGaussian; break;
    case DataPolicy::Kind::kLqrMeanGaussian: kind_ = Kind::kLqrMeanGaussian; break;
    case DataPolicy::Kind::kToric: kind_ = Kind::kToric; break;
  }
  const double action_sigma = kind_ == Kind::kToric ? policy.sigma_a : policy.sigma;
  if (!(action_sigma > 0.0)) throw std::invalid_argument("action sigma must be > 0");
  if (kind_ == Kind::kToric && (!(policy.sigma_r > 0.0) || bounds.state_dim() != 2)) {
    throw std::invalid_argument("toric density needs sigma_r > 0 and a planar state");
  }
  if (kind_ == Kind::kLqrMeanGaussian &&
      (policy.gain.cols() != bounds.state_dim() || policy.gain.rows() != bounds.action_dim())) {
    throw std::invalid_argument("LQR gain shape does not match the grid");
  }
}

AnalyticDensity::AnalyticDensity(const ChainSystem& chain)
    : kind_(Kind::kChainTable), chain_(std::make_shared<ChainSystem>(chain)) {}

AnalyticDensity AnalyticDensity::FromJson(const nlohmann::json& j, const StateActionGrid& bounds) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "chain-table") {
    return AnalyticDensity(BuildChain(j.at("H").get<int>(), j.at("K").get<int>(),
                                      j.at("epsilon").get<double>()));
  }
  if (kind == "zero-mean-gaussian" || kind == "lqr-mean-gaussian" || kind == "toric") {
    return AnalyticDensity(DataPolicy::FromJson(j), bounds);
  }
  throw std::invalid_argument("unknown analytic density kind '" + kind + "'");
}

namespace {

double LogNormalPdf(double x, double sigma) {
  return -0.5 * (x / sigma) * (x / sigma) - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double StdNormalCdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

double AnalyticDensity::Evaluate(std::span<const double> state,
                                 std::span<const double> action) const {
  if (kind_ == Kind::kChainTable) {
    return chain_->Density(std::lround(state[0]), std::lround(action[0]));
  }
  double log_p = 0.0;
  if (kind_ == Kind::kToric) {
    const double rho = policy_.rho;
    const double sr = policy_.sigma_r;
    const double r = std::hypot(state[0], state[1]);
    // Normalizer of exp(-(|s| - rho)^2 / 2 sr^2) over the plane.
    const double z = 2.0 * std::numbers::pi *
                     (sr * sr * std::exp(-rho * rho / (2.0 * sr * sr)) +
                      rho * sr * std::sqrt(2.0 * std::numbers::pi) * StdNormalCdf(rho / sr));
    log_p = -0.5 * ((r - rho) / sr) * ((r - rho) / sr) - std::log(z);
    for (double a : action) log_p += LogNormalPdf(a, policy_.sigma_a);
    return std::exp(log_p);
  }
  if (policy_.state_sigma > 0.0) {
    for (double s : state) log_p += LogNormalPdf(s, policy_.state_sigma);
  } else {
    log_p -= std::log(state_volume_);
  }
  if (kind_ == Kind::kLqrMeanGaussian) {
    const Eigen::Map<const Eigen::VectorXd> s(state.data(), static_cast<Eigen::Index>(state.size()));
    const Eigen::VectorXd mean = -policy_.gain * s;
    for (std::size_t i = 0; i < action.size(); ++i) {
      log_p += LogNormalPdf(action[i] - mean[static_cast<Eigen::Index>(i)], policy_.sigma);
    }
  } else {
    for (double a : action) log_p += LogNormalPdf(a, policy_.sigma);
  }
  return std::exp(log_p);
}

double AnalyticDensity::Evaluate(const Eigen::VectorXd& state, const Eigen::VectorXd& action) const {
  return Evaluate(std::span<const double>(state.data(), static_cast<std::size_t>(state.size())),
                  std::span<const double>(action.data(), static_cast<std::size_t>(action.size())));
}

ScalarField AnalyticDensity::ToField(std::shared_ptr<const StateActionGrid> grid) const {
  const std::size_t na = grid->num_actions();
  std::vector<double> values(grid->num_cells());
  std::vector<double> s(grid->state_dim()), a(grid->action_dim());
  std::vector<std::vector<double>> actions(na, std::vector<double>(grid->action_dim()));
  for (std::size_t j = 0; j < na; ++j) grid->ActionNodeInto(j, actions[j]);
  for (std::size_t i = 0; i < grid->num_states(); ++i) {
    grid->StateNodeInto(i, s);
    for (std::size_t j = 0; j < na; ++j) values[i * na + j] = Evaluate(s, actions[j]);
  }
  return ScalarField(std::move(grid), std::move(values), FieldRole::kDensity, 0.0);
}

nlohmann::json AnalyticDensity::Describe() const {
  if (kind_ == Kind::kChainTable) {
    return {{"kind", "chain-table"},
            {"H", chain_->horizon()},
            {"K", chain_->k()},
            {"epsilon", chain_->epsilon()}};
  }
  nlohmann::json j = policy_.Describe();
  j["kind"] = ToString(kind_);
  if (kind_ != Kind::kToric && policy_.state_sigma <= 0.0) j["state_law"] = "uniform";
  return j;
}

ScalarField ToEnergy(const ScalarField& density, double floor) {
  if (density.role() != FieldRole::kDensity) {
    throw std::invalid_argument("ToEnergy needs a density-role field, got " +
                                ToString(density.role()));
  }
  if (!(floor > 0.0)) throw std::invalid_argument("density floor must be > 0");
  const std::vector<double>& p = density.values();
  std::vector<double> e(p.size());
  double max_finite = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] >= floor) {
      e[i] = -std::log(p[i]);
      max_finite = std::max(max_finite, e[i]);
    }
  }
  if (!std::isfinite(max_finite)) max_finite = -std::log(floor);
  const double sentinel = max_finite + kSentinelMargin;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < floor) e[i] = sentinel;
  }
  return ScalarField(density.grid_ptr(), std::move(e), FieldRole::kEnergy, sentinel);
}

}  // namespace ldm
