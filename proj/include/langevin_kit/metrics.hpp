#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "assignment.hpp"
#include "model.hpp"
#include "samplers.hpp"

namespace langevin {

// Gaussian with diagonal covariance; variance entries may be zero (point
// mass in that coordinate).
struct GaussianLaw {
  VectorXd mean;
  VectorXd var;

  bool point_mass() const { return var.maxCoeff() == 0.0; }
};

inline GaussianLaw dirac_law(const VectorXd& point) {
  return {point, VectorXd::Zero(point.size())};
}

// Stationary law of a diagonal quadratic target: N(mu, diag(1/a)).
inline GaussianLaw target_law(const Target& target) {
  if (!target.quadratic)
    throw std::invalid_argument("closed-form law needs a quadratic target");
  return {target.quadratic->mean, target.quadratic->curvature.cwiseInverse()};
}

// Exact law of the Euler chain on a diagonal quadratic after K steps:
// per coordinate, mean offset times (1 - h a) and v <- (1 - h a)^2 v + 2h.
inline GaussianLaw lmc_pushforward(const Target& target,
                                   const GaussianLaw& init,
                                   const StepSchedule& schedule, long long K) {
  if (!target.quadratic)
    throw std::invalid_argument("pushforward needs a quadratic target");
  const VectorXd& a = target.quadratic->curvature;
  const VectorXd& mu = target.quadratic->mean;
  VectorXd off = init.mean - mu;
  VectorXd v = init.var;
  for (long long k = 0; k < K; ++k) {
    const double h = schedule.step(k);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double c = 1.0 - h * a[i];
      off[i] *= c;
      v[i] = c * c * v[i] + 2.0 * h;
    }
  }
  return {mu + off, v};
}

inline GaussianLaw lmc_pushforward(const Target& target, const VectorXd& theta0,
                                   const StepSchedule& schedule, long long K) {
  return lmc_pushforward(target, dirac_law(theta0), schedule, K);
}

// Exact law of the second-order chain on a diagonal quadratic: the exact
// Ornstein-Uhlenbeck transition per coordinate,
// mean offset times e^{-h a} and v <- e^{-2ha} v + (1 - e^{-2ha})/a.
inline GaussianLaw lmco_pushforward(const Target& target,
                                    const GaussianLaw& init, double h,
                                    long long K) {
  if (!target.quadratic)
    throw std::invalid_argument("pushforward needs a quadratic target");
  const VectorXd& a = target.quadratic->curvature;
  const VectorXd& mu = target.quadratic->mean;
  VectorXd off = init.mean - mu;
  VectorXd v = init.var;
  for (long long k = 0; k < K; ++k) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double e1 = std::exp(-h * a[i]);
      const double e2 = e1 * e1;
      off[i] *= e1;
      v[i] = e2 * v[i] + (1.0 - e2) / a[i];
    }
  }
  return {mu + off, v};
}

inline GaussianLaw lmco_pushforward(const Target& target,
                                    const VectorXd& theta0, double h,
                                    long long K) {
  return lmco_pushforward(target, dirac_law(theta0), h, K);
}

// W2 between commuting (diagonal) Gaussians:
// sqrt(|muA - muB|^2 + sum_i (sqrt(vA_i) - sqrt(vB_i))^2).
inline double gaussian_w2(const GaussianLaw& a, const GaussianLaw& b) {
  if (a.mean.size() != b.mean.size())
    throw std::invalid_argument("law dimension mismatch");
  double s = (a.mean - b.mean).squaredNorm();
  for (Eigen::Index i = 0; i < a.var.size(); ++i) {
    const double d = std::sqrt(a.var[i]) - std::sqrt(b.var[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

// Exact empirical W2 between equal-size samples (rows), via optimal
// assignment with squared-Euclidean costs. Capped at desk scale.
inline double empirical_w2(const MatrixXd& X, const MatrixXd& Y) {
  if (X.rows() != Y.rows() || X.cols() != Y.cols())
    throw std::invalid_argument("sample sets must have equal shape");
  const Eigen::Index n = X.rows();
  if (n > 4096) throw std::invalid_argument("sample count capped at 4096");
  MatrixXd cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      cost(i, j) = (X.row(i) - Y.row(j)).squaredNorm();
  return std::sqrt(detail::linear_assignment_cost(cost) / n);
}

struct MomentReport {
  VectorXd mean;
  VectorXd cov_diag;          // unbiased per-coordinate variances
  double grad_sq_mean = 0.0;  // average of |grad f|^2, when a target is given
};

inline MomentReport moment_report(const MatrixXd& samples,
                                  const Target* target = nullptr) {
  const Eigen::Index n = samples.rows();
  if (n < 2) throw std::invalid_argument("need >= 2 samples");
  MomentReport rep;
  rep.mean = samples.colwise().mean();
  rep.cov_diag =
      (samples.rowwise() - rep.mean.transpose()).cwiseAbs2().colwise().sum() /
      static_cast<double>(n - 1);
  if (target) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      s += target->gradient(samples.row(i).transpose()).squaredNorm();
    rep.grad_sq_mean = s / n;
  }
  return rep;
}

}  // namespace langevin
