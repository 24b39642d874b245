#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "langevin_kit/model.hpp"
#include "langevin_kit/rng.hpp"

using namespace langevin;

namespace {

VectorXd fd_gradient(const Target& t, const VectorXd& theta, double step) {
  VectorXd g(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    VectorXd plus = theta, minus = theta;
    plus[i] += step;
    minus[i] -= step;
    g[i] = (t.value(plus) - t.value(minus)) / (2.0 * step);
  }
  return g;
}

VectorXd random_point(Rng& g, Eigen::Index p, double scale) {
  VectorXd v(p);
  for (Eigen::Index i = 0; i < p; ++i) v[i] = scale * standard_normal(g);
  return v;
}

Target small_ridge() {
  MatrixXd X(3, 2);
  X << 1.0, 0.5, -0.3, 1.2, 0.8, -0.7;
  VectorXd y(3);
  y << 1.0, -1.0, 1.0;
  return ridge_logistic(X, y, 0.5);
}

}  // namespace

TEST_CASE("evaluate on isotropic targets", "[model]") {
  const VectorXd mu = VectorXd::Zero(2);
  {
    const Target t = isotropic_gaussian(1.0, mu);
    const auto r = evaluate(t, mu);
    REQUIRE(r.value == 0.0);
    REQUIRE(r.gradient.isZero(0.0));
  }
  {
    const Target t = isotropic_gaussian(2.0, mu);
    VectorXd theta(2);
    theta << 1.0, 0.0;
    const auto r = evaluate(t, theta);
    REQUIRE(r.value == Catch::Approx(1.0));
    REQUIRE(r.gradient[0] == Catch::Approx(2.0));
    REQUIRE(r.gradient[1] == 0.0);
  }
}

TEST_CASE("evaluate rejects dimension mismatch", "[model]") {
  const Target t = isotropic_gaussian(1.0, VectorXd::Zero(3));
  REQUIRE_THROWS_AS(evaluate(t, VectorXd::Zero(2)), std::invalid_argument);
}

TEST_CASE("ridge logistic value and gradient at the origin", "[model]") {
  const Target t = small_ridge();
  const VectorXd zero = VectorXd::Zero(2);
  REQUIRE(t.value(zero) == Catch::Approx(3.0 * std::log(2.0)).epsilon(1e-14));
  const VectorXd g = t.gradient(zero);
  const VectorXd fd = fd_gradient(t, zero, 1e-6);
  REQUIRE((g - fd).norm() < 1e-8);
}

TEST_CASE("finite-difference gradients for every built-in target", "[model]") {
  Rng g = make_stream(202, 0);
  std::vector<Target> targets;
  targets.push_back(isotropic_gaussian(2.0, random_point(g, 3, 1.0)));
  {
    VectorXd a(3);
    a << 1.0, 2.5, 5.0;
    targets.push_back(diagonal_gaussian(a, random_point(g, 3, 1.0)));
  }
  targets.push_back(small_ridge());
  {
    VectorXd a(2);
    a << 1.0, 3.0;
    std::vector<VectorXd> centers = {random_point(g, 2, 1.0),
                                     random_point(g, 2, 1.0),
                                     random_point(g, 2, 1.0)};
    targets.push_back(finite_sum_quadratic(a, centers));
  }
  for (const auto& t : targets) {
    for (int trial = 0; trial < 100; ++trial) {
      const VectorXd theta = random_point(g, t.certificate.p, 2.0);
      const VectorXd grad = t.gradient(theta);
      const VectorXd fd = fd_gradient(t, theta, 1e-6);
      REQUIRE((grad - fd).norm() <= 1e-5 * (1.0 + grad.norm()));
    }
  }
}

TEST_CASE("quadratic gradients equal Hessian-vector products", "[model]") {
  VectorXd a(3);
  a << 1.0, 2.0, 4.0;
  const VectorXd mu = VectorXd::Ones(3);
  const Target t = diagonal_gaussian(a, mu);
  Rng g = make_stream(7, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const VectorXd theta = random_point(g, 3, 2.0);
    REQUIRE(t.gradient(theta).isApprox(t.hess_vec(theta, theta - mu), 1e-14));
  }
}

TEST_CASE("certify accepts correct constants and flags wrong ones", "[model]") {
  Rng g = make_stream(99, 0);
  {
    const Target t = isotropic_gaussian(3.0, VectorXd::Zero(2));
    std::vector<std::pair<VectorXd, VectorXd>> pairs;
    for (int i = 0; i < 1000; ++i)
      pairs.emplace_back(random_point(g, 2, 2.0), random_point(g, 2, 2.0));
    REQUIRE(certify(t, pairs, 1e-9).ok());
  }
  {
    VectorXd a(2);
    a << 1.0, 5.0;
    const Target t = diagonal_gaussian(a, VectorXd::Zero(2));
    std::vector<std::pair<VectorXd, VectorXd>> pairs;
    VectorXd e0 = VectorXd::Unit(2, 0), e1 = VectorXd::Unit(2, 1);
    pairs.emplace_back(e0, VectorXd::Zero(2));
    pairs.emplace_back(e1, VectorXd::Zero(2));
    REQUIRE(certify(t, pairs, 1e-9).ok());

    // same target with an overclaimed strong-convexity constant
    Target wrong = t;
    wrong.certificate.m = 6.0;
    const auto rep = certify(wrong, pairs, 1e-9);
    REQUIRE_FALSE(rep.ok());
    bool axis_violation = false;
    for (const auto& v : rep.violations)
      if (v.kind == "strong_convexity") axis_violation = true;
    REQUIRE(axis_violation);
  }
  {
    // every built-in with declared constants and random probes
    const Target t = small_ridge();
    std::vector<std::pair<VectorXd, VectorXd>> pairs;
    for (int i = 0; i < 1000; ++i)
      pairs.emplace_back(random_point(g, 2, 3.0), random_point(g, 2, 3.0));
    REQUIRE(certify(t, pairs, 1e-9).ok());
  }
}

TEST_CASE("initial W2 bound routes", "[model]") {
  {
    const Target t = isotropic_gaussian(1.0, VectorXd::Zero(4));
    REQUIRE(initial_w2_bound(t, VectorXd::Zero(4)) == Catch::Approx(2.0));
  }
  {
    const Target t = isotropic_gaussian(10.0, VectorXd::Zero(100));
    VectorXd theta0 = VectorXd::Zero(100);
    theta0[0] = 10.0;  // squared distance 100
    REQUIRE(initial_w2_bound(t, theta0) ==
            Catch::Approx(std::sqrt(110.0)).epsilon(1e-14));
  }
  {
    // value route only: f >= 0 with f(theta0) = 8, m = 2, p = 4
    Target t;
    t.certificate = {2.0, 2.0, std::nullopt, 4};
    t.value = [](const VectorXd&) { return 8.0; };
    t.gradient = [](const VectorXd& th) { return VectorXd(2.0 * th); };
    t.value_lower_bound = 0.0;
    REQUIRE(initial_w2_bound(t, VectorXd::Zero(4)) ==
            Catch::Approx(std::sqrt(10.0)).epsilon(1e-14));
  }
  {
    Target t;
    t.certificate = {1.0, 1.0, std::nullopt, 2};
    t.value = [](const VectorXd& th) { return 0.5 * th.squaredNorm(); };
    t.gradient = [](const VectorXd& th) { return th; };
    REQUIRE_THROWS(initial_w2_bound(t, VectorXd::Zero(2)));
  }
}

TEST_CASE("certificate validation", "[model]") {
  TargetCertificate c{0.0, 1.0, std::nullopt, 2};
  REQUIRE_THROWS_AS(c.validate(), std::invalid_argument);
  c = {2.0, 1.0, std::nullopt, 2};
  REQUIRE_THROWS_AS(c.validate(), std::invalid_argument);
  c = {1.0, 1.0, -1.0, 2};
  REQUIRE_THROWS_AS(c.validate(), std::invalid_argument);
  c = {1.0, 1.0, std::nullopt, 0};
  REQUIRE_THROWS_AS(c.validate(), std::invalid_argument);
}
