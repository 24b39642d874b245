#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

namespace langevin::linalg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline void require_symmetric(const MatrixXd& H, double rel_tol = 1e-12) {
  if (H.rows() != H.cols())
    throw std::invalid_argument("symmetric matrix expected, got non-square");
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > rel_tol * scale)
    throw std::invalid_argument("matrix is not symmetric");
}

// U phi(Lambda) U^T from the eigendecomposition H = U Lambda U^T.
inline MatrixXd sym_func(const MatrixXd& H,
                         const std::function<double(double)>& phi) {
  require_symmetric(H);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(H);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  VectorXd lam = es.eigenvalues();
  for (Eigen::Index i = 0; i < lam.size(); ++i) lam[i] = phi(lam[i]);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

// (1 - e^{-x}) / x, stable as x -> 0. Guarded series below 1e-4.
inline double expm1_ratio(double x) {
  if (std::abs(x) < 1e-4)
    return 1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0;
  return -std::expm1(-x) / x;
}

struct StepMatrices {
  MatrixXd drift;     // (I - e^{-hH}) H^{-1}
  MatrixXd cov;       // (I - e^{-2hH}) H^{-1}
  MatrixXd cov_sqrt;  // principal square root of cov
};

// All three matrices from one eigendecomposition, so they commute exactly.
// Per-eigenvalue maps: lambda -> h*r(h*lambda), 2h*r(2h*lambda), and the
// square root of the latter, with r the stable expm1 ratio (limit h at 0).
inline StepMatrices lmco_matrices(const MatrixXd& H, double h) {
  require_symmetric(H);
  if (h <= 0.0) throw std::invalid_argument("step size must be positive");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(H);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  const VectorXd& lam = es.eigenvalues();
  if (lam.minCoeff() <= 0.0)
    throw std::invalid_argument("Hessian is not positive definite");
  const Eigen::Index p = lam.size();
  VectorXd d1(p), d2(p), d3(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    d1[i] = h * expm1_ratio(h * lam[i]);
    d2[i] = 2.0 * h * expm1_ratio(2.0 * h * lam[i]);
    d3[i] = std::sqrt(d2[i]);
  }
  const MatrixXd& U = es.eigenvectors();
  StepMatrices out;
  out.drift = U * d1.asDiagonal() * U.transpose();
  out.cov = U * d2.asDiagonal() * U.transpose();
  out.cov_sqrt = U * d3.asDiagonal() * U.transpose();
  return out;
}

// (I - h/2 H) eta + (sqrt(3)/6) h H eta2, using only Hessian-vector products.
// For independent standard normal eta, eta2 the result has covariance
// I - hH + (1/3) h^2 H^2, which is what the square-root-free second-order
// sampler needs.
inline VectorXd sqrt_free_cov_factor_apply(
    const std::function<VectorXd(const VectorXd&)>& hess_vec, double h,
    const VectorXd& eta, const VectorXd& eta2) {
  if (eta.size() != eta2.size())
    throw std::invalid_argument("noise vectors have mismatched dimensions");
  return eta - (0.5 * h) * hess_vec(eta) +
         (std::sqrt(3.0) / 6.0 * h) * hess_vec(eta2);
}

inline VectorXd sqrt_free_cov_factor_apply(const MatrixXd& H, double h,
                                           const VectorXd& eta,
                                           const VectorXd& eta2) {
  if (H.rows() != eta.size())
    throw std::invalid_argument("matrix/vector dimension mismatch");
  return sqrt_free_cov_factor_apply(
      [&H](const VectorXd& v) -> VectorXd { return H * v; }, h, eta, eta2);
}

}  // namespace langevin::linalg
