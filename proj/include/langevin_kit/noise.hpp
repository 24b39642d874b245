#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "model.hpp"
#include "rng.hpp"

namespace langevin {

// Gradient corruption with declared bias level delta (E|E(zeta|theta)|^2 <=
// delta^2 p) and standard-deviation level sigma (E|zeta - E(zeta|theta)|^2 <=
// sigma^2 p). The draw takes an explicit RNG handle; samplers hand it a
// substream separate from their own innovations.
struct NoiseModel {
  double delta = 0.0;
  double sigma = 0.0;
  int p = 0;
  std::function<VectorXd(const VectorXd&, Rng&)> draw_fn;
};

inline VectorXd draw(const NoiseModel& model, const VectorXd& theta, Rng& rng) {
  if (theta.size() != model.p)
    throw std::invalid_argument("noise/point dimension mismatch");
  return model.draw_fn(theta, rng);
}

inline NoiseModel zero_noise(int p) {
  NoiseModel n;
  n.p = p;
  n.draw_fn = [p](const VectorXd&, Rng&) -> VectorXd {
    return VectorXd::Zero(p);
  };
  return n;
}

// Fixed bias vector plus isotropic Gaussian noise of standard deviation sigma.
inline NoiseModel gaussian_noise(const VectorXd& bias, double sigma) {
  NoiseModel n;
  n.p = static_cast<int>(bias.size());
  n.delta = bias.norm() / std::sqrt(static_cast<double>(n.p));
  n.sigma = sigma;
  n.draw_fn = [bias, sigma](const VectorXd&, Rng& rng) -> VectorXd {
    if (sigma == 0.0) return bias;
    return bias + sigma * normal_vector(rng, bias.size());
  };
  return n;
}

// Deterministic bias delta * theta/|theta|; stresses the conditional
// expectation form of the bias condition.
inline NoiseModel state_dependent_bias(double delta, int p) {
  NoiseModel n;
  n.p = p;
  n.delta = delta;
  n.draw_fn = [delta, p](const VectorXd& theta, Rng&) -> VectorXd {
    const double norm = theta.norm();
    if (norm == 0.0) return VectorXd::Zero(p);
    return (delta / norm) * theta;
  };
  return n;
}

// zeta = minibatch-average of component gradients minus the full gradient,
// indices drawn uniformly with replacement (so the 1/s variance law is
// exact). delta = 0; sigma is the exact population value maximized over the
// probe set, computed by full enumeration at construction.
inline NoiseModel subsampled_gradient(const Target& target, int batch,
                                      const std::vector<VectorXd>& probes) {
  if (!target.finite_sum)
    throw std::invalid_argument("target has no finite-sum structure");
  if (batch < 1) throw std::invalid_argument("batch size must be >= 1");
  const FiniteSumStructure fs = *target.finite_sum;
  const int n = fs.n;
  const int p = target.certificate.p;
  const auto full_grad = target.gradient;

  // A full batch is the exact gradient: no subsampling, no noise.
  if (batch >= n) {
    NoiseModel out;
    out.p = p;
    out.draw_fn = [p](const VectorXd&, Rng&) -> VectorXd {
      return VectorXd::Zero(p);
    };
    return out;
  }

  double max_var = 0.0;
  for (const auto& theta : probes) {
    const VectorXd g = full_grad(theta);
    double v = 0.0;
    for (int i = 0; i < n; ++i)
      v += (fs.component_gradient(i, theta) - g).squaredNorm();
    max_var = std::max(max_var, v / n);
  }

  NoiseModel out;
  out.p = p;
  out.delta = 0.0;
  out.sigma = std::sqrt(max_var / (batch * static_cast<double>(p)));
  out.draw_fn = [fs, full_grad, batch, n, p](const VectorXd& theta,
                                             Rng& rng) -> VectorXd {
    VectorXd sum = VectorXd::Zero(p);
    for (int j = 0; j < batch; ++j) {
      const int idx = static_cast<int>(uniform_index(rng, n));
      sum += fs.component_gradient(idx, theta);
    }
    return sum / batch - full_grad(theta);
  };
  return out;
}

struct ConditionNReport {
  double delta_hat = 0.0;
  double sigma_hat = 0.0;
  std::size_t probes = 0;
  int draws_per_point = 0;
};

// Monte-Carlo estimates of the bias and standard-deviation levels over the
// probe set. Conditioning is on the probe point, which is exact for
// state-dependent deterministic biases.
inline ConditionNReport certify_condition_n(const NoiseModel& model,
                                            const Target& target,
                                            const std::vector<VectorXd>& probes,
                                            int draws_per_point,
                                            std::uint64_t seed = 0) {
  if (draws_per_point < 100)
    throw std::invalid_argument("need >= 100 draws per probe point");
  Rng rng = make_stream(seed, 0);
  const double p = target.certificate.p;
  ConditionNReport rep;
  rep.probes = probes.size();
  rep.draws_per_point = draws_per_point;
  for (const auto& theta : probes) {
    target.check_dim(theta);
    std::vector<VectorXd> zs;
    zs.reserve(draws_per_point);
    VectorXd mean = VectorXd::Zero(model.p);
    for (int i = 0; i < draws_per_point; ++i) {
      zs.push_back(draw(model, theta, rng));
      mean += zs.back();
    }
    mean /= draws_per_point;
    double var = 0.0;
    for (const auto& z : zs) var += (z - mean).squaredNorm();
    var /= std::max(1, draws_per_point - 1);
    rep.delta_hat = std::max(rep.delta_hat, mean.norm() / std::sqrt(p));
    rep.sigma_hat = std::max(rep.sigma_hat, std::sqrt(var / p));
  }
  return rep;
}

}  // namespace langevin
