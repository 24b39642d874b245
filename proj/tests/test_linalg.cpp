#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "langevin_kit/linalg.hpp"
#include "langevin_kit/rng.hpp"

using namespace langevin;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Independent matrix-exponential oracle: scaling and squaring with a Taylor
// series, no eigendecomposition.
MatrixXd expm_oracle(MatrixXd A) {
  int s = 0;
  double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.25) {
    norm /= 2.0;
    ++s;
  }
  A /= std::ldexp(1.0, s);
  const Eigen::Index n = A.rows();
  MatrixXd result = MatrixXd::Identity(n, n);
  MatrixXd term = MatrixXd::Identity(n, n);
  for (int k = 1; k <= 30; ++k) {
    term = term * A / k;
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int i = 0; i < s; ++i) result = result * result;
  return result;
}

MatrixXd random_spd(Rng& g, Eigen::Index n, double shift) {
  MatrixXd B(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) B(i, j) = standard_normal(g);
  return B * B.transpose() + shift * MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("sym_func basics", "[linalg]") {
  const MatrixXd Z = MatrixXd::Zero(3, 3);
  REQUIRE(linalg::sym_func(Z, [](double x) { return std::exp(x); })
              .isApprox(MatrixXd::Identity(3, 3), 1e-14));

  MatrixXd D = MatrixXd::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = 2.0;
  const MatrixXd E = linalg::sym_func(D, [](double x) { return std::exp(x); });
  REQUIRE(E(0, 0) == Catch::Approx(std::exp(1.0)).epsilon(1e-13));
  REQUIRE(E(1, 1) == Catch::Approx(std::exp(2.0)).epsilon(1e-13));
  REQUIRE(std::abs(E(0, 1)) < 1e-13);
}

TEST_CASE("sym_func exp matches the scaled-and-squared oracle", "[linalg]") {
  Rng g = make_stream(123, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXd H = random_spd(g, 4, 0.1);
    const MatrixXd A = linalg::sym_func(H, [](double x) { return std::exp(x); });
    const MatrixXd B = expm_oracle(H);
    REQUIRE((A - B).cwiseAbs().maxCoeff() <=
            1e-10 * B.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("sym_func identity map and inverse-exponential product", "[linalg]") {
  Rng g = make_stream(9, 0);
  const MatrixXd H = random_spd(g, 5, 0.5);
  REQUIRE(linalg::sym_func(H, [](double x) { return x; })
              .isApprox(H, 1e-12));
  const MatrixXd P =
      linalg::sym_func(H, [](double x) { return std::exp(x); }) *
      linalg::sym_func(H, [](double x) { return std::exp(-x); });
  REQUIRE((P - MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("sym_func rejects non-symmetric input", "[linalg]") {
  MatrixXd A = MatrixXd::Zero(2, 2);
  A(0, 1) = 1.0;
  REQUIRE_THROWS_AS(linalg::sym_func(A, [](double x) { return x; }),
                    std::invalid_argument);
}

TEST_CASE("expm1_ratio is stable near zero", "[linalg]") {
  REQUIRE(linalg::expm1_ratio(0.0) == 1.0);
  REQUIRE(linalg::expm1_ratio(1e-14) == Catch::Approx(1.0).epsilon(1e-12));
  REQUIRE(linalg::expm1_ratio(1.0) ==
          Catch::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
  // series/direct agreement across the guard boundary
  for (double x : {9e-5, 1.1e-4, 5e-5, 2e-4})
    REQUIRE(linalg::expm1_ratio(x) ==
            Catch::Approx(-std::expm1(-x) / x).epsilon(1e-12));
}

TEST_CASE("lmco_matrices scalar case", "[linalg]") {
  const MatrixXd H = 2.0 * MatrixXd::Identity(3, 3);
  const auto mats = linalg::lmco_matrices(H, 0.5);
  const double expected = (1.0 - std::exp(-1.0)) / 2.0;
  REQUIRE(mats.drift.isApprox(expected * MatrixXd::Identity(3, 3), 1e-13));
  const double cov = (1.0 - std::exp(-2.0)) / 2.0;
  REQUIRE(mats.cov.isApprox(cov * MatrixXd::Identity(3, 3), 1e-13));
  REQUIRE(mats.cov_sqrt.isApprox(std::sqrt(cov) * MatrixXd::Identity(3, 3),
                                 1e-13));
}

TEST_CASE("lmco_matrices tiny-eigenvalue limit is h", "[linalg]") {
  MatrixXd H = MatrixXd::Zero(2, 2);
  H(0, 0) = 1e-14;
  H(1, 1) = 1.0;
  const auto mats = linalg::lmco_matrices(H, 1.0);
  REQUIRE(mats.drift(0, 0) == Catch::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("lmco_matrices matches an expm-then-solve oracle", "[linalg]") {
  Rng g = make_stream(77, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXd H = random_spd(g, 3, 0.3);
    const double h = 0.2;
    const auto mats = linalg::lmco_matrices(H, h);
    const MatrixXd I = MatrixXd::Identity(3, 3);
    const MatrixXd drift_oracle =
        H.fullPivLu().solve(I - expm_oracle(-h * H));
    const MatrixXd cov_oracle =
        H.fullPivLu().solve(I - expm_oracle(-2.0 * h * H));
    REQUIRE((mats.drift - drift_oracle).cwiseAbs().maxCoeff() < 1e-10);
    REQUIRE((mats.cov - cov_oracle).cwiseAbs().maxCoeff() < 1e-10);
    REQUIRE((mats.cov_sqrt * mats.cov_sqrt - mats.cov).cwiseAbs().maxCoeff() <
            1e-12);
  }
}

TEST_CASE("lmco_matrices rejects non-PSD Hessians", "[linalg]") {
  MatrixXd H = MatrixXd::Identity(2, 2);
  H(1, 1) = -1.0;
  REQUIRE_THROWS_AS(linalg::lmco_matrices(H, 0.1), std::invalid_argument);
}

TEST_CASE("per-eigenvalue two-step factorization identity", "[linalg]") {
  Rng g = make_stream(31, 0);
  for (int i = 0; i < 100; ++i) {
    const double lam = 0.01 + 5.0 * uniform01(g);
    const double h = 0.001 + uniform01(g);
    const double lhs = -std::expm1(-2.0 * h * lam) / lam;
    const double rhs =
        -std::expm1(-h * lam) * (1.0 + std::exp(-h * lam)) / lam;
    REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-14));
  }
}

TEST_CASE("square-root-free factor degenerate cases", "[linalg]") {
  const VectorXd eta = VectorXd::LinSpaced(4, 1.0, 4.0);
  const VectorXd eta2 = VectorXd::LinSpaced(4, -2.0, 2.0);
  REQUIRE(linalg::sqrt_free_cov_factor_apply(MatrixXd(MatrixXd::Zero(4, 4)),
                                             0.3, eta, eta2)
              .isApprox(eta, 1e-15));
  REQUIRE(linalg::sqrt_free_cov_factor_apply(
              MatrixXd(MatrixXd::Identity(4, 4)), 0.0, eta, eta2)
              .isApprox(eta, 1e-15));
}

TEST_CASE("square-root-free covariance identity on diagonal H", "[linalg]") {
  // (1 - h a / 2)^2 + h^2 a^2 / 12 = 1 - h a + h^2 a^2 / 3, per eigenvalue
  Rng g = make_stream(55, 0);
  for (int i = 0; i < 100; ++i) {
    const double a = 10.0 * uniform01(g);
    const double h = uniform01(g);
    const double lhs = std::pow(1.0 - 0.5 * h * a, 2) +
                       h * h * a * a / 12.0;
    const double rhs = 1.0 - h * a + h * h * a * a / 3.0;
    REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-12).margin(1e-12));
  }
}
