#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace langevin {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Smoothness/convexity certificate of a potential. Constants are declared by
// the user and spot-checked, never estimated.
struct TargetCertificate {
  double m = 0.0;            // strong convexity
  double M = 0.0;            // gradient Lipschitz
  std::optional<double> M2;  // Hessian Lipschitz
  int p = 0;                 // dimension

  void validate() const {
    if (!(m > 0.0) || !(M >= m))
      throw std::invalid_argument("certificate requires 0 < m <= M");
    if (M2 && *M2 < 0.0)
      throw std::invalid_argument("M2 must be nonnegative");
    if (p < 1) throw std::invalid_argument("dimension must be >= 1");
  }
};

// f = 1/2 sum_i a_i (theta_i - mu_i)^2; closed-form chain laws exist for
// targets of this shape.
struct QuadraticForm {
  VectorXd mean;
  VectorXd curvature;
};

// f = (1/n) sum_i l_i, exposed for gradient subsampling.
struct FiniteSumStructure {
  int n = 0;
  std::function<VectorXd(int, const VectorXd&)> component_gradient;
};

struct Target {
  TargetCertificate certificate;
  std::function<double(const VectorXd&)> value;
  std::function<VectorXd(const VectorXd&)> gradient;
  std::function<MatrixXd(const VectorXd&)> hessian;  // may be empty
  std::function<VectorXd(const VectorXd&, const VectorXd&)>
      hessian_vec;  // may be empty; falls back to dense hessian
  std::optional<VectorXd> minimizer;
  std::optional<double> value_lower_bound;  // certified lower bound of f
  std::optional<QuadraticForm> quadratic;
  std::optional<FiniteSumStructure> finite_sum;

  bool has_hessian() const { return static_cast<bool>(hessian); }

  VectorXd hess_vec(const VectorXd& theta, const VectorXd& v) const {
    if (hessian_vec) return hessian_vec(theta, v);
    if (hessian) return hessian(theta) * v;
    throw std::runtime_error("target has no Hessian oracle");
  }

  void check_dim(const VectorXd& theta) const {
    if (theta.size() != certificate.p)
      throw std::invalid_argument("point dimension does not match target");
  }
};

// ---------------------------------------------------------------------------
// Built-in targets

inline Target isotropic_gaussian(double m, const VectorXd& mu) {
  Target t;
  t.certificate = {m, m, 0.0, static_cast<int>(mu.size())};
  t.certificate.validate();
  const int p = t.certificate.p;
  t.value = [m, mu](const VectorXd& th) {
    return 0.5 * m * (th - mu).squaredNorm();
  };
  t.gradient = [m, mu](const VectorXd& th) -> VectorXd {
    return m * (th - mu);
  };
  t.hessian = [m, p](const VectorXd&) -> MatrixXd {
    return m * MatrixXd::Identity(p, p);
  };
  t.hessian_vec = [m](const VectorXd&, const VectorXd& v) -> VectorXd {
    return m * v;
  };
  t.minimizer = mu;
  t.value_lower_bound = 0.0;
  t.quadratic = QuadraticForm{mu, VectorXd::Constant(p, m)};
  return t;
}

inline Target diagonal_gaussian(const VectorXd& a, const VectorXd& mu) {
  if (a.size() != mu.size())
    throw std::invalid_argument("curvature/mean dimension mismatch");
  Target t;
  t.certificate = {a.minCoeff(), a.maxCoeff(), 0.0,
                   static_cast<int>(a.size())};
  t.certificate.validate();
  t.value = [a, mu](const VectorXd& th) {
    return 0.5 * a.dot((th - mu).cwiseAbs2());
  };
  t.gradient = [a, mu](const VectorXd& th) -> VectorXd {
    return a.cwiseProduct(th - mu);
  };
  t.hessian = [a](const VectorXd&) -> MatrixXd {
    return MatrixXd(a.asDiagonal());
  };
  t.hessian_vec = [a](const VectorXd&, const VectorXd& v) -> VectorXd {
    return a.cwiseProduct(v);
  };
  t.minimizer = mu;
  t.value_lower_bound = 0.0;
  t.quadratic = QuadraticForm{mu, a};
  return t;
}

inline double log1pexp(double x) {
  // log(1 + e^x) without overflow
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

// f(theta) = sum_i log(1 + exp(-y_i x_i^T theta)) + (lambda/2) |theta|^2.
// Rows of X are observations, y_i in {-1, +1}.
inline Target ridge_logistic(const MatrixXd& X, const VectorXd& y,
                             double lambda) {
  if (X.rows() != y.size())
    throw std::invalid_argument("label/observation count mismatch");
  if (lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  // M = lambda + (1/4) lambda_max(X^T X), computed once.
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(X.transpose() * X);
  const double M = lambda + 0.25 * es.eigenvalues().maxCoeff();

  Target t;
  t.certificate = {lambda, M, std::nullopt, p};
  t.certificate.validate();
  t.value = [X, y, lambda](const VectorXd& th) {
    const VectorXd z = X * th;
    double s = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) s += log1pexp(-y[i] * z[i]);
    return s + 0.5 * lambda * th.squaredNorm();
  };
  t.gradient = [X, y, lambda](const VectorXd& th) -> VectorXd {
    const VectorXd z = X * th;
    VectorXd g = lambda * th;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double s = 1.0 / (1.0 + std::exp(y[i] * z[i]));  // sigma(-y z)
      g -= y[i] * s * X.row(i).transpose();
    }
    return g;
  };
  t.hessian = [X, y, lambda, p](const VectorXd& th) -> MatrixXd {
    const VectorXd z = X * th;
    MatrixXd H = lambda * MatrixXd::Identity(p, p);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double s = 1.0 / (1.0 + std::exp(-z[i] * y[i]));
      H += s * (1.0 - s) * X.row(i).transpose() * X.row(i);
    }
    return H;
  };
  t.value_lower_bound = 0.0;
  // l_i = n * loss_i + (lambda/2)|theta|^2, so f = (1/n) sum l_i.
  FiniteSumStructure fs;
  fs.n = n;
  fs.component_gradient = [X, y, lambda,
                           n](int i, const VectorXd& th) -> VectorXd {
    const double z = X.row(i).dot(th);
    const double s = 1.0 / (1.0 + std::exp(y[i] * z));
    return lambda * th - static_cast<double>(n) * y[i] * s *
                             VectorXd(X.row(i).transpose());
  };
  t.finite_sum = std::move(fs);
  return t;
}

// f = (1/n) sum_i 1/2 (theta - c_i)^T diag(a) (theta - c_i); the aggregate is
// the diagonal quadratic centered at the mean of the c_i.
inline Target finite_sum_quadratic(const VectorXd& a,
                                   const std::vector<VectorXd>& centers) {
  if (centers.empty()) throw std::invalid_argument("need >= 1 component");
  const int n = static_cast<int>(centers.size());
  const int p = static_cast<int>(a.size());
  VectorXd cbar = VectorXd::Zero(p);
  for (const auto& c : centers) {
    if (c.size() != p) throw std::invalid_argument("center dimension mismatch");
    cbar += c;
  }
  cbar /= n;

  Target t;
  t.certificate = {a.minCoeff(), a.maxCoeff(), 0.0, p};
  t.certificate.validate();
  t.value = [a, centers, n](const VectorXd& th) {
    double s = 0.0;
    for (const auto& c : centers) s += 0.5 * a.dot((th - c).cwiseAbs2());
    return s / n;
  };
  t.gradient = [a, cbar](const VectorXd& th) -> VectorXd {
    return a.cwiseProduct(th - cbar);
  };
  t.hessian = [a](const VectorXd&) -> MatrixXd {
    return MatrixXd(a.asDiagonal());
  };
  t.hessian_vec = [a](const VectorXd&, const VectorXd& v) -> VectorXd {
    return a.cwiseProduct(v);
  };
  t.minimizer = cbar;
  t.value_lower_bound = 0.0;
  t.quadratic = QuadraticForm{cbar, a};
  FiniteSumStructure fs;
  fs.n = n;
  fs.component_gradient = [a, centers](int i, const VectorXd& th) -> VectorXd {
    return a.cwiseProduct(th - centers[static_cast<std::size_t>(i)]);
  };
  t.finite_sum = std::move(fs);
  return t;
}

// ---------------------------------------------------------------------------
// Operations

struct EvalResult {
  double value;
  VectorXd gradient;
};

inline EvalResult evaluate(const Target& t, const VectorXd& theta) {
  t.check_dim(theta);
  EvalResult r{t.value(theta), t.gradient(theta)};
  if (!r.gradient.allFinite())
    throw std::runtime_error("gradient oracle returned non-finite values");
  return r;
}

struct CertViolation {
  std::size_t pair_index;
  std::string kind;  // "strong_convexity" or "lipschitz"
  double observed;
  double declared;
};

struct CertReport {
  std::vector<CertViolation> violations;
  std::size_t pairs_checked = 0;
  bool ok() const { return violations.empty(); }
};

// Spot-checks condition (m-strong convexity, M-Lipschitz gradient) on the
// given point pairs. Violations are report content, not errors.
inline CertReport certify(const Target& t,
                          const std::vector<std::pair<VectorXd, VectorXd>>& pairs,
                          double tolerance) {
  if (pairs.empty()) throw std::invalid_argument("need >= 1 probe pair");
  const double m = t.certificate.m;
  const double M = t.certificate.M;
  CertReport rep;
  rep.pairs_checked = pairs.size();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const VectorXd& a = pairs[i].first;
    const VectorXd& b = pairs[i].second;
    t.check_dim(a);
    t.check_dim(b);
    const double d2 = (a - b).squaredNorm();
    const double gap = t.value(a) - t.value(b) - t.gradient(b).dot(a - b);
    if (gap < 0.5 * (m - tolerance) * d2)
      rep.violations.push_back(
          {i, "strong_convexity", d2 > 0 ? 2.0 * gap / d2 : m, m});
    const double grad_diff = (t.gradient(a) - t.gradient(b)).norm();
    const double dist = std::sqrt(d2);
    if (grad_diff > (M + tolerance) * dist)
      rep.violations.push_back(
          {i, "lipschitz", dist > 0 ? grad_diff / dist : M, M});
  }
  return rep;
}

// Computable upper bound on W2(delta_{theta0}, pi). Uses the minimizer route
// |theta0 - theta*|^2 + p/m when a minimizer is known, and the value route
// (2(f(theta0) - inf f) + p)/m when a lower bound on f is certified; returns
// the smaller of the applicable ones.
inline double initial_w2_bound(const Target& t, const VectorXd& theta0) {
  t.check_dim(theta0);
  const double m = t.certificate.m;
  const double p = t.certificate.p;
  std::optional<double> best;
  if (t.minimizer) {
    const double b2 = (theta0 - *t.minimizer).squaredNorm() + p / m;
    best = b2;
  }
  if (t.value_lower_bound) {
    const double b2 = (2.0 * (t.value(theta0) - *t.value_lower_bound) + p) / m;
    if (!best || b2 < *best) best = b2;
  }
  if (!best)
    throw std::runtime_error(
        "initial W2 bound needs a known minimizer or a lower bound on f");
  return std::sqrt(*best);
}

}  // namespace langevin
