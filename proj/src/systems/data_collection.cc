#include "ldm/systems/data_collection.h"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "ldm/core/random.h"

namespace ldm {

std::string ToString(DataPolicy::Kind kind) {
  switch (kind) {
    case DataPolicy::Kind::kZeroMeanGaussian: return "zero-mean-gaussian";
    case DataPolicy::Kind::kLqrMeanGaussian: return "lqr-mean-gaussian";
    case DataPolicy::Kind::kToric: return "toric";
  }
  return "unknown";
}

DataPolicy DataPolicy::ZeroMeanGaussian(double sigma) {
  DataPolicy p;
  p.kind = Kind::kZeroMeanGaussian;
  p.sigma = sigma;
  return p;
}

DataPolicy DataPolicy::LqrMeanGaussian(double sigma, Eigen::MatrixXd gain) {
  DataPolicy p;
  p.kind = Kind::kLqrMeanGaussian;
  p.sigma = sigma;
  p.gain = std::move(gain);
  return p;
}

DataPolicy DataPolicy::Toric(double rho, double sigma_r, double sigma_a) {
  DataPolicy p;
  p.kind = Kind::kToric;
  p.rho = rho;
  p.sigma_r = sigma_r;
  p.sigma_a = sigma_a;
  return p;
}

Eigen::VectorXd DataPolicy::Mean(const Eigen::VectorXd& state, int action_dim) const {
  if (kind == Kind::kLqrMeanGaussian) {
    if (gain.cols() != state.size() || gain.rows() != action_dim) {
      throw std::invalid_argument("LQR gain shape does not match system");
    }
    return -gain * state;
  }
  return Eigen::VectorXd::Zero(action_dim);
}

nlohmann::json DataPolicy::Describe() const {
  nlohmann::json j = {{"kind", ToString(kind)}};
  switch (kind) {
    case Kind::kZeroMeanGaussian:
      j["sigma"] = sigma;
      j["state_sigma"] = state_sigma;
      break;
    case Kind::kLqrMeanGaussian: {
      j["sigma"] = sigma;
      j["state_sigma"] = state_sigma;
      nlohmann::json g = nlohmann::json::array();
      for (Eigen::Index r = 0; r < gain.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < gain.cols(); ++c) row.push_back(gain(r, c));
        g.push_back(row);
      }
      j["gain"] = g;
      break;
    }
    case Kind::kToric:
      j["rho"] = rho;
      j["sigma_r"] = sigma_r;
      j["sigma_a"] = sigma_a;
      break;
  }
  return j;
}

DataPolicy DataPolicy::FromJson(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  DataPolicy p;
  if (kind == "zero-mean-gaussian") {
    p = ZeroMeanGaussian(j.value("sigma", 1.0));
  } else if (kind == "lqr-mean-gaussian") {
    Eigen::MatrixXd g;
    if (j.contains("gain")) {
      const auto& rows = j.at("gain");
      g.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.at(0).size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) g(r, c) = rows[r][c].get<double>();
      }
    }
    p = LqrMeanGaussian(j.value("sigma", 1.0), g);
  } else if (kind == "toric") {
    p = Toric(j.value("rho", 5.0), j.value("sigma_r", 1.0), j.value("sigma_a", 1.0));
  } else {
    throw std::invalid_argument("unknown data policy '" + kind + "'");
  }
  p.state_sigma = j.value("state_sigma", 0.0);
  return p;
}

namespace {

Eigen::VectorXd SampleState(const DataPolicy& policy, const StateActionGrid& bounds, Rng& rng) {
  const int ds = bounds.state_dim();
  Eigen::VectorXd s(ds);
  if (policy.kind == DataPolicy::Kind::kToric) {
    if (ds != 2) throw std::invalid_argument("toric law needs a planar state");
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> radial(policy.rho, policy.sigma_r);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r_max = policy.rho + 8.0 * policy.sigma_r;
    double r = 0.0;
    for (;;) {
      r = radial(rng);
      if (r <= 0.0) continue;
      if (unit(rng) * r_max <= r) break;
    }
    const double th = angle(rng);
    s << r * std::cos(th), r * std::sin(th);
    return s;
  }
  if (policy.state_sigma > 0.0) {
    std::normal_distribution<double> n(0.0, policy.state_sigma);
    for (int i = 0; i < ds; ++i) s[i] = n(rng);
    return s;
  }
  for (int i = 0; i < ds; ++i) {
    const GridAxis& ax = bounds.state_axes()[i];
    std::uniform_real_distribution<double> u(ax.lo, ax.hi);
    s[i] = u(rng);
  }
  return s;
}

}  // namespace

TransitionDataset CollectDataset(const DynamicalSystem& system, const StateActionGrid& bounds,
                                 const DataPolicy& policy, std::size_t n_samples,
                                 std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  const int ds = system.state_dim();
  const int da = system.action_dim();
  TransitionDataset data(ds, da);
  data.SetBounds(bounds);
  data.policy = policy.Describe().dump();
  data.seed = seed;
  Rng rng = MakeRng(seed, "dataset");
  const double action_sigma =
      policy.kind == DataPolicy::Kind::kToric ? policy.sigma_a : policy.sigma;
  std::normal_distribution<double> noise(0.0, action_sigma);
  const std::size_t max_draws = 1000 * n_samples + 100000;
  std::size_t draws = 0;
  while (data.size() < n_samples) {
    if (++draws > max_draws) {
      throw std::runtime_error("data law puts too little mass inside the grid bounds");
    }
    Eigen::VectorXd s = SampleState(policy, bounds, rng);
    Eigen::VectorXd a = policy.Mean(s, da);
    for (int i = 0; i < da; ++i) a[i] += noise(rng);
    Eigen::VectorXd next = system.Step(s, a);
    data.Add({std::move(s), std::move(a), std::move(next)});
  }
  return data;
}

}  // namespace ldm
