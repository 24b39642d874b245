#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "linalg.hpp"
#include "model.hpp"
#include "noise.hpp"
#include "rng.hpp"

namespace langevin {

// ---------------------------------------------------------------------------
// Step schedules

inline long long compute_K1(double m, double M, double p, double w2_0) {
  if (!(m > 0.0) || !(M >= m) || !(p >= 1.0) || !(w2_0 >= 0.0))
    throw std::invalid_argument("compute_K1: invalid constants");
  if (M == m) return 0;  // denominator is infinite
  if (w2_0 == 0.0) return 0;
  const double num = std::log(w2_0 / std::sqrt(p)) + std::log(m / M) +
                     0.5 * std::log(M + m);
  if (num <= 0.0) return 0;
  const double den = std::log1p(2.0 * m / (M - m));
  return static_cast<long long>(std::ceil(num / den));
}

// Either a constant step or the decaying schedule
// h_{k+1} = 2 / (M + m + (2/3) m (k - K1)_+), constant 2/(M+m) during warmup.
struct StepSchedule {
  enum class Kind { Constant, DecayingWarmup };
  Kind kind = Kind::Constant;
  double h = 0.0;        // constant kind
  double m = 0.0, M = 0.0;
  long long K1 = 0;      // warmup length, decaying kind

  static StepSchedule constant(double h) {
    if (h <= 0.0) throw std::invalid_argument("step size must be positive");
    StepSchedule s;
    s.kind = Kind::Constant;
    s.h = h;
    return s;
  }

  static StepSchedule decaying(double m, double M, long long K1) {
    if (!(m > 0.0) || !(M >= m) || K1 < 0)
      throw std::invalid_argument("invalid decaying schedule parameters");
    StepSchedule s;
    s.kind = Kind::DecayingWarmup;
    s.m = m;
    s.M = M;
    s.K1 = K1;
    return s;
  }

  // h_{k+1} for iteration index k = 0, 1, ...
  double step(long long k) const {
    if (kind == Kind::Constant) return h;
    const double excess =
        k > K1 ? static_cast<double>(k - K1) : 0.0;
    return 2.0 / (M + m + (2.0 / 3.0) * m * excess);
  }
};

// ---------------------------------------------------------------------------
// Chains

struct ChainState {
  VectorXd theta;
  long long k = 0;
  Rng rng;        // Gaussian innovations
  Rng noise_rng;  // gradient-noise substream, independent of innovations
};

inline ChainState make_chain(const VectorXd& theta0, std::uint64_t seed) {
  ChainState s;
  s.theta = theta0;
  s.rng = make_stream(seed, 0);
  s.noise_rng = make_stream(seed, 1);
  return s;
}

struct TraceRecord {
  long long k;
  double h;  // step used to reach this iterate (0 for the initial record)
  VectorXd theta;
};

struct ChainTrace {
  long long stride = 1;
  std::vector<TraceRecord> records;
};

struct RunResult {
  ChainState state;
  ChainTrace trace;
  std::vector<std::string> warnings;
};

namespace detail {

inline void record(ChainTrace& trace, long long k, double h,
                   const VectorXd& theta, long long K) {
  if (k % trace.stride == 0 || k == K)
    trace.records.push_back({k, h, theta});
}

}  // namespace detail

// One Euler step theta - h grad f(theta) + sqrt(2h) xi.
inline ChainState lmc_step(ChainState state, const Target& target, double h) {
  if (h < 0.0) throw std::invalid_argument("step size must be nonnegative");
  const VectorXd g = evaluate(target, state.theta).gradient;
  const VectorXd xi = normal_vector(state.rng, state.theta.size());
  state.theta = state.theta - h * g + std::sqrt(2.0 * h) * xi;
  state.k += 1;
  return state;
}

inline RunResult lmc_run(const Target& target, const VectorXd& theta0,
                         const StepSchedule& schedule, long long K,
                         std::uint64_t seed, long long stride = 1) {
  target.check_dim(theta0);
  RunResult out;
  const double m = target.certificate.m;
  const double M = target.certificate.M;
  if (schedule.kind == StepSchedule::Kind::Constant) {
    if (schedule.h >= 2.0 / M)
      throw std::invalid_argument("constant step must satisfy h < 2/M");
    if (schedule.h > 2.0 / (m + M))
      out.warnings.push_back("h > 2/(m+M): slower contraction regime");
  }
  out.state = make_chain(theta0, seed);
  out.trace.stride = stride;
  detail::record(out.trace, 0, 0.0, theta0, K);
  for (long long k = 0; k < K; ++k) {
    const double h = schedule.step(k);
    out.state = lmc_step(std::move(out.state), target, h);
    detail::record(out.trace, out.state.k, h, out.state.theta, K);
  }
  return out;
}

// Noisy-gradient chain: each step uses Y = grad f(theta) + zeta. The noise is
// drawn from its own substream, so the Gaussian innovations stay independent
// of the whole noise history.
inline RunResult nlmc_run(const Target& target, const VectorXd& theta0,
                          double h, long long K, const NoiseModel& noise,
                          std::uint64_t seed, long long stride = 1) {
  target.check_dim(theta0);
  if (noise.p != target.certificate.p)
    throw std::invalid_argument("noise dimension does not match target");
  RunResult out;
  const double m = target.certificate.m;
  const double M = target.certificate.M;
  if (h > 2.0 / (m + M))
    out.warnings.push_back("h > 2/(m+M): outside the noisy-chain hypothesis");
  out.state = make_chain(theta0, seed);
  out.trace.stride = stride;
  detail::record(out.trace, 0, 0.0, theta0, K);
  for (long long k = 0; k < K; ++k) {
    const VectorXd y = evaluate(target, out.state.theta).gradient +
                       draw(noise, out.state.theta, out.state.noise_rng);
    const VectorXd xi = normal_vector(out.state.rng, theta0.size());
    out.state.theta -= h * y;
    out.state.theta += std::sqrt(2.0 * h) * xi;
    out.state.k += 1;
    detail::record(out.trace, out.state.k, h, out.state.theta, K);
  }
  return out;
}

// Second-order chain with exact matrix exponentials of the local Hessian:
// theta' = theta - (I - e^{-hH}) H^{-1} grad f + ((I - e^{-2hH}) H^{-1})^{1/2} xi.
inline RunResult lmco_run(const Target& target, const VectorXd& theta0,
                          double h, long long K, std::uint64_t seed,
                          long long stride = 1) {
  target.check_dim(theta0);
  if (!target.has_hessian())
    throw std::invalid_argument("second-order chain needs a Hessian oracle");
  RunResult out;
  const double m = target.certificate.m;
  const double M = target.certificate.M;
  if (h > m / (M * M))
    out.warnings.push_back("h > m/M^2: outside the second-order hypothesis");
  out.state = make_chain(theta0, seed);
  out.trace.stride = stride;
  detail::record(out.trace, 0, 0.0, theta0, K);
  for (long long k = 0; k < K; ++k) {
    const MatrixXd H = target.hessian(out.state.theta);
    const auto mats = linalg::lmco_matrices(H, h);
    const VectorXd g = evaluate(target, out.state.theta).gradient;
    const VectorXd xi = normal_vector(out.state.rng, theta0.size());
    out.state.theta += -mats.drift * g + mats.cov_sqrt * xi;
    out.state.k += 1;
    detail::record(out.trace, out.state.k, h, out.state.theta, K);
  }
  return out;
}

// Square-root-free second-order chain. Uses only Hessian-vector products:
// theta' = theta - h (I - h/2 H) grad f + sqrt(2h) * factor(eta, eta'),
// where factor has covariance I - hH + (1/3) h^2 H^2.
inline RunResult lmco_prime_run(const Target& target, const VectorXd& theta0,
                                double h, long long K, std::uint64_t seed,
                                long long stride = 1) {
  target.check_dim(theta0);
  if (!target.hessian_vec && !target.hessian)
    throw std::invalid_argument("chain needs a Hessian-vector product");
  RunResult out;
  const double m = target.certificate.m;
  const double M = target.certificate.M;
  if (h > 0.75 * m / (M * M))
    out.warnings.push_back("h > 3m/(4M^2): outside the hypothesis range");
  out.state = make_chain(theta0, seed);
  out.trace.stride = stride;
  detail::record(out.trace, 0, 0.0, theta0, K);
  const Eigen::Index p = theta0.size();
  for (long long k = 0; k < K; ++k) {
    const VectorXd& th = out.state.theta;
    const VectorXd g = evaluate(target, th).gradient;
    const VectorXd eta = normal_vector(out.state.rng, p);
    const VectorXd eta2 = normal_vector(out.state.rng, p);
    const VectorXd noise = linalg::sqrt_free_cov_factor_apply(
        [&](const VectorXd& v) { return target.hess_vec(th, v); }, h, eta,
        eta2);
    out.state.theta =
        th - h * (g - 0.5 * h * target.hess_vec(th, g)) +
        std::sqrt(2.0 * h) * noise;
    out.state.k += 1;
    detail::record(out.trace, out.state.k, h, out.state.theta, K);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mixture chain

// pi = integral of exp(-f_eta) over eta ~ pi0; every component shares the
// declared certificate.
struct MixtureTarget {
  TargetCertificate certificate;
  std::function<VectorXd(Rng&)> draw_eta;
  std::function<Target(const VectorXd&)> component;
};

struct MlmcResult {
  ChainState state;
  ChainTrace trace;
  VectorXd eta;
  std::vector<std::string> warnings;
};

// Draws eta once, then runs the decaying-schedule chain on f_eta. The caller
// supplies the mixture-level initial distance w2_0 that sizes the warmup.
inline MlmcResult mlmc_run(const MixtureTarget& mixture, const VectorXd& theta0,
                           long long K, double w2_0, std::uint64_t seed,
                           long long stride = 1) {
  Rng eta_rng = make_stream(seed, 2);
  const VectorXd eta = mixture.draw_eta(eta_rng);
  const Target component = mixture.component(eta);
  if (component.certificate.m != mixture.certificate.m ||
      component.certificate.M != mixture.certificate.M)
    throw std::runtime_error("component certificate differs from mixture's");
  const double m = mixture.certificate.m;
  const double M = mixture.certificate.M;
  const long long K1 = compute_K1(m, M, mixture.certificate.p, w2_0);
  auto run = lmc_run(component, theta0, StepSchedule::decaying(m, M, K1), K,
                     seed, stride);
  return {std::move(run.state), std::move(run.trace), eta,
          std::move(run.warnings)};
}

// ---------------------------------------------------------------------------
// Scaled-potential limits

enum class TauMode { Lmc, Lmco };

// Runs the chosen sampler on f/tau. For the first-order mode the update is
// theta - h grad f + sqrt(2 h tau) xi, which for tau -> 0 becomes gradient
// descent; tau = 0 is implemented as the exact deterministic limit
// (gradient step 1/M, or the Newton step for the second-order mode).
inline ChainState tau_scaled_run(const Target& target, double tau,
                                 TauMode mode, const VectorXd& theta0,
                                 double h, long long K, std::uint64_t seed) {
  if (tau < 0.0) throw std::invalid_argument("tau must be nonnegative");
  target.check_dim(theta0);
  ChainState state = make_chain(theta0, seed);
  const Eigen::Index p = theta0.size();
  for (long long k = 0; k < K; ++k) {
    const VectorXd g = evaluate(target, state.theta).gradient;
    if (tau == 0.0) {
      if (mode == TauMode::Lmc) {
        state.theta -= g / target.certificate.M;
      } else {
        const MatrixXd H = target.hessian(state.theta);
        state.theta -= H.ldlt().solve(g);
      }
    } else if (mode == TauMode::Lmc) {
      const VectorXd xi = normal_vector(state.rng, p);
      state.theta += -h * g + std::sqrt(2.0 * h * tau) * xi;
    } else {
      // second-order chain on f/tau with step h
      const MatrixXd H = target.hessian(state.theta) / tau;
      const auto mats = linalg::lmco_matrices(H, h);
      const VectorXd xi = normal_vector(state.rng, p);
      state.theta += -mats.drift * (g / tau) + mats.cov_sqrt * xi;
    }
    state.k += 1;
  }
  return state;
}

}  // namespace langevin
