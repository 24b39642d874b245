#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "langevin_kit/model.hpp"
#include "langevin_kit/noise.hpp"
#include "langevin_kit/rng.hpp"

using namespace langevin;

namespace {

Target three_center_quadratic() {
  VectorXd a(2);
  a << 1.0, 3.0;
  std::vector<VectorXd> centers;
  VectorXd c0(2), c1(2), c2(2);
  c0 << 1.0, 0.0;
  c1 << -1.0, 2.0;
  c2 << 0.0, -2.0;
  centers = {c0, c1, c2};
  return finite_sum_quadratic(a, centers);
}

}  // namespace

TEST_CASE("zero noise draws zero and certifies (0, 0)", "[noise]") {
  const NoiseModel n = zero_noise(3);
  Rng g = make_stream(1, 0);
  REQUIRE(draw(n, VectorXd::Ones(3), g).isZero(0.0));

  const Target t = isotropic_gaussian(1.0, VectorXd::Zero(3));
  const auto rep =
      certify_condition_n(n, t, {VectorXd::Zero(3), VectorXd::Ones(3)}, 200);
  REQUIRE(rep.delta_hat == 0.0);
  REQUIRE(rep.sigma_hat == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("noiseless Gaussian model returns the bias exactly", "[noise]") {
  VectorXd b(2);
  b << 0.3, -0.4;
  const NoiseModel n = gaussian_noise(b, 0.0);
  Rng g = make_stream(2, 0);
  for (int i = 0; i < 10; ++i)
    REQUIRE(draw(n, VectorXd::Zero(2), g).isApprox(b, 1e-15));
  REQUIRE(n.delta == Catch::Approx(b.norm() / std::sqrt(2.0)));
}

TEST_CASE("Gaussian noise certification recovers (delta, sigma)", "[noise]") {
  const int p = 4;
  const double delta = 0.25;
  VectorXd b = VectorXd::Zero(p);
  b[0] = delta * std::sqrt(static_cast<double>(p));  // |b| = delta sqrt(p)
  const NoiseModel n = gaussian_noise(b, 1.0);
  const Target t = isotropic_gaussian(1.0, VectorXd::Zero(p));
  const int draws = 20000;
  const auto rep = certify_condition_n(n, t, {VectorXd::Zero(p)}, draws, 5);
  // 3 standard errors on the estimates
  const double se_mean = 1.0 / std::sqrt(static_cast<double>(draws * p));
  REQUIRE(std::abs(rep.delta_hat - delta) < 3.0 * se_mean + 0.01);
  REQUIRE(std::abs(rep.sigma_hat - 1.0) <
          3.0 * std::sqrt(0.5 / (draws * p)) + 0.01);
}

TEST_CASE("state-dependent bias follows the unit direction", "[noise]") {
  const NoiseModel n = state_dependent_bias(0.7, 2);
  Rng g = make_stream(3, 0);
  VectorXd theta(2);
  theta << 3.0, 4.0;
  const VectorXd z = draw(n, theta, g);
  REQUIRE(z.norm() == Catch::Approx(0.7).epsilon(1e-14));
  REQUIRE(z.isApprox(0.7 * theta / 5.0, 1e-14));
  REQUIRE(draw(n, VectorXd::Zero(2), g).isZero(0.0));

  const Target t = isotropic_gaussian(1.0, VectorXd::Zero(2));
  const auto rep = certify_condition_n(n, t, {theta}, 200);
  REQUIRE(rep.delta_hat == Catch::Approx(0.7 / std::sqrt(2.0)).epsilon(1e-12));
  REQUIRE(rep.sigma_hat == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("full-batch subsampling is exact", "[noise]") {
  const Target t = three_center_quadratic();
  const NoiseModel n = subsampled_gradient(
      t, t.finite_sum->n, {VectorXd::Zero(2), VectorXd::Ones(2)});
  Rng g = make_stream(4, 0);
  for (int i = 0; i < 5; ++i)
    REQUIRE(draw(n, VectorXd::Ones(2), g).isZero(0.0));
  REQUIRE(n.delta == 0.0);
  REQUIRE(n.sigma == 0.0);
}

TEST_CASE("subsampled sigma equals the enumerated population value",
          "[noise]") {
  const Target t = three_center_quadratic();
  const int batch = 2;
  std::vector<VectorXd> probes = {VectorXd::Zero(2), VectorXd::Ones(2)};
  const NoiseModel n = subsampled_gradient(t, batch, probes);

  // independent enumeration of the single-draw population variance
  double max_var = 0.0;
  for (const auto& theta : probes) {
    const VectorXd g = t.gradient(theta);
    double v = 0.0;
    for (int i = 0; i < t.finite_sum->n; ++i)
      v += (t.finite_sum->component_gradient(i, theta) - g).squaredNorm();
    max_var = std::max(max_var, v / t.finite_sum->n);
  }
  // with-replacement averaging divides the variance by the batch size
  REQUIRE(n.sigma ==
          Catch::Approx(std::sqrt(max_var / (batch * 2.0))).epsilon(1e-14));
  REQUIRE(n.delta == 0.0);
}

TEST_CASE("subsampled draws have mean zero and the declared variance",
          "[noise]") {
  const Target t = three_center_quadratic();
  const NoiseModel n = subsampled_gradient(t, 2, {VectorXd::Zero(2)});
  const Target& target = t;
  const auto rep =
      certify_condition_n(n, target, {VectorXd::Zero(2)}, 40000, 11);
  REQUIRE(rep.delta_hat < 0.03);
  REQUIRE(std::abs(rep.sigma_hat - n.sigma) < 0.03);
}

TEST_CASE("subsampling requires finite-sum structure", "[noise]") {
  const Target t = isotropic_gaussian(1.0, VectorXd::Zero(2));
  REQUIRE_THROWS_AS(subsampled_gradient(t, 1, {VectorXd::Zero(2)}),
                    std::invalid_argument);
}

TEST_CASE("certification requires enough draws", "[noise]") {
  const NoiseModel n = zero_noise(2);
  const Target t = isotropic_gaussian(1.0, VectorXd::Zero(2));
  REQUIRE_THROWS_AS(certify_condition_n(n, t, {VectorXd::Zero(2)}, 99),
                    std::invalid_argument);
}
