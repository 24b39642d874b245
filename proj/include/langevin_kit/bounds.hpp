#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace langevin::bounds {

// Inputs of the guarantee evaluators; h and K are ignored by evaluators that
// do not use them.
struct BoundQuery {
  double m = 0.0;
  double M = 0.0;
  std::optional<double> M2;
  double p = 0.0;
  double h = 0.0;
  long long K = 0;
  double w2_0 = 0.0;
  double delta = 0.0;
  double sigma = 0.0;

  void validate() const {
    if (!(m > 0.0) || !(M >= m)) throw std::invalid_argument("need 0 < m <= M");
    if (!(p >= 1.0)) throw std::invalid_argument("need p >= 1");
    if (K < 0) throw std::invalid_argument("need K >= 0");
    if (w2_0 < 0.0 || delta < 0.0 || sigma < 0.0)
      throw std::invalid_argument("w2_0, delta, sigma must be >= 0");
  }
};

struct BoundValue {
  double value = 0.0;
  std::string tag;
  bool hypothesis_ok = true;  // false when a step-size hypothesis is violated
  std::string note;
};

// (1 - x)^K evaluated safely for very large K.
inline double contraction_pow(double x, long long K) {
  if (K == 0) return 1.0;
  const double base = 1.0 - x;
  if (base <= 0.0) return 0.0;
  return std::exp(static_cast<double>(K) * std::log(base));
}

// Constant-step first-order guarantee. Case (a) for h <= 2/(m+M),
// case (b) for larger h; undefined at h >= 2/M.
inline BoundValue bound_thm1(const BoundQuery& q) {
  q.validate();
  if (!(q.h > 0.0) || q.h >= 2.0 / q.M)
    throw std::invalid_argument("bound_thm1 requires 0 < h < 2/M");
  BoundValue out;
  out.tag = "thm1";
  const double hp = std::sqrt(q.h * q.p);
  if (q.h <= 2.0 / (q.m + q.M)) {
    out.value = contraction_pow(q.m * q.h, q.K) * q.w2_0 +
                1.65 * (q.M / q.m) * hp;
    out.note = "case (a)";
  } else {
    const double Mh = q.M * q.h;
    out.value = contraction_pow(2.0 - Mh, q.K) * q.w2_0 +
                1.65 * Mh / (2.0 - Mh) * hp;
    out.note = "case (b)";
  }
  return out;
}

// Varying-step guarantee at iteration k >= K1:
// 3.5 M sqrt(p) / (m sqrt(M + m + (2/3) m (k - K1))).
inline BoundValue bound_thm2(double m, double M, double p, long long k,
                             long long K1) {
  if (!(m > 0.0) || !(M >= m) || !(p >= 1.0))
    throw std::invalid_argument("invalid constants");
  if (k < K1) throw std::invalid_argument("bound_thm2 requires k >= K1");
  BoundValue out;
  out.tag = "thm2";
  out.value = 3.5 * M * std::sqrt(p) /
              (m * std::sqrt(M + m + (2.0 / 3.0) * m *
                                         static_cast<double>(k - K1)));
  return out;
}

// Noisy-gradient guarantee: case (a) of the accurate bound plus the bias term
// delta sqrt(p)/m and the variance term sigma^2 sqrt(hp)/(1.65M + sigma sqrt(m)).
inline BoundValue bound_thm3(const BoundQuery& q) {
  q.validate();
  if (!(q.h > 0.0) || q.h >= 2.0 / q.M)
    throw std::invalid_argument("bound_thm3 requires 0 < h < 2/M");
  BoundValue out;
  out.tag = "thm3";
  if (q.h > 2.0 / (q.m + q.M)) {
    out.hypothesis_ok = false;
    out.note = "h > 2/(m+M)";
  }
  const double hp = std::sqrt(q.h * q.p);
  out.value = contraction_pow(q.m * q.h, q.K) * q.w2_0 +
              1.65 * (q.M / q.m) * hp + q.delta * std::sqrt(q.p) / q.m +
              q.sigma * q.sigma * hp /
                  (1.65 * q.M + q.sigma * std::sqrt(q.m));
  return out;
}

// Noisy-gradient guarantee under Hessian smoothness.
inline BoundValue bound_thm4(const BoundQuery& q) {
  q.validate();
  if (!q.M2) throw std::invalid_argument("bound_thm4 requires M2");
  if (!(q.h > 0.0)) throw std::invalid_argument("need h > 0");
  BoundValue out;
  out.tag = "thm4";
  if (q.h > 2.0 / (q.m + q.M)) {
    out.hypothesis_ok = false;
    out.note = "h > 2/(m+M)";
  }
  const double M2 = *q.M2;
  const double hp = std::sqrt(q.h * q.p);
  const double sigma_term =
      q.sigma == 0.0
          ? 0.0
          : 2.0 * q.sigma * q.sigma * hp /
                (M2 * hp + 2.0 * q.sigma * std::sqrt(q.m));
  out.value = contraction_pow(q.m * q.h, q.K) * q.w2_0 +
              M2 * q.h * q.p / (2.0 * q.m) +
              (11.0 / 5.0) * q.M * q.h * std::sqrt(q.M * q.p) / q.m +
              q.delta * std::sqrt(q.p) / q.m + sigma_term;
  return out;
}

enum class SecondOrderVariant { Exact, SqrtFree };

// Second-order guarantees. The statement constants are the default; the
// sharper constants appearing at the end of the derivation are available
// behind the flag.
inline BoundValue bound_thm5(const BoundQuery& q, SecondOrderVariant variant,
                             bool proof_constants = false) {
  q.validate();
  if (!q.M2) throw std::invalid_argument("bound_thm5 requires M2");
  if (!(q.h > 0.0)) throw std::invalid_argument("need h > 0");
  const double M2 = *q.M2;
  BoundValue out;
  const double hmax = variant == SecondOrderVariant::Exact
                          ? q.m / (q.M * q.M)
                          : 0.75 * q.m / (q.M * q.M);
  if (q.h > hmax) {
    out.hypothesis_ok = false;
    out.note = "h above the second-order step cap";
  }
  const double contraction = contraction_pow(0.25 * q.m * q.h, q.K) * q.w2_0;
  if (variant == SecondOrderVariant::Exact) {
    out.tag = "thm5_lmco";
    const double c = proof_constants ? 7.2 : 11.5;
    out.value = contraction + c * M2 * q.h * (q.p + 1.0) / q.m;
  } else {
    out.tag = "thm5_lmco_prime";
    const double c_mid = proof_constants ? 1.23 : 1.3;
    const double c_last = proof_constants ? 7.28 : 7.3;
    out.value = contraction +
                c_mid * q.M * q.M * q.h * q.h * std::sqrt(q.M * q.p) / q.m +
                c_last * M2 * q.h * (q.p + 1.0) / q.m;
  }
  return out;
}

// Fixed-step second-order bound with doubly-exponential contraction,
// (2m/M2) (w_K exp(v_K w_K^{-2^K}))^{2^K}, evaluated in log space.
// w_high is the caller-supplied W_{2^{K+1}}(nu_0, pi).
inline BoundValue bound_propB(double m, double M, double M2, double p,
                              double h, int K, double w_high) {
  if (!(m > 0.0) || !(M >= m) || !(p >= 1.0) || !(h > 0.0) || w_high < 0.0)
    throw std::invalid_argument("invalid parameters");
  if (M2 <= 0.0)
    throw std::invalid_argument("bound undefined for M2 = 0");
  if (K < 0 || K > 50)
    throw std::invalid_argument("K must be in [0, 50] so 2^K stays exact");
  const double t = std::ldexp(1.0, K);  // 2^K, exact
  const double w = M2 * w_high / (2.0 * m) + 0.5 * std::exp(-m * h);
  const double v = 2.0 * M2 * std::pow(M, 1.5) * std::sqrt(2.0 * p + t) /
                       (m * m * m) +
                   std::exp(-m * h);
  BoundValue out;
  out.tag = "propB";
  // log value = log(2m/M2) + t log w + v t exp(-t log w)
  const double log_w = std::log(w);
  const double exp_term = v * t * std::exp(-t * log_w);
  const double log_value = std::log(2.0 * m / M2) + t * log_w + exp_term;
  if (!std::isfinite(log_value) || log_value > 700.0) {
    out.value = std::numeric_limits<double>::infinity();
    out.hypothesis_ok = false;
    out.note = "overflow despite log-space evaluation";
    return out;
  }
  out.value = std::exp(log_value);
  return out;
}

// Constant-step comparison bound from prior work: sqrt of
// 2 (1 - mMh/(m+M))^K W0^2
//   + (Mhp/m)(m+M)(h + (m+M)/(2mM))(2 + M^2 h/m + M^2 h^2 / 6).
inline BoundValue bound_dm(const BoundQuery& q) {
  q.validate();
  if (!(q.h > 0.0)) throw std::invalid_argument("need h > 0");
  BoundValue out;
  out.tag = "dm";
  const double rho = q.m * q.M * q.h / (q.m + q.M);
  const double first = 2.0 * contraction_pow(rho, q.K) * q.w2_0 * q.w2_0;
  const double second = (q.M * q.h * q.p / q.m) * (q.m + q.M) *
                        (q.h + (q.m + q.M) / (2.0 * q.m * q.M)) *
                        (2.0 + q.M * q.M * q.h / q.m +
                         q.M * q.M * q.h * q.h / 6.0);
  out.value = std::sqrt(first + second);
  if (rho >= 1.0) {
    out.hypothesis_ok = false;
    out.note = "contraction factor nonpositive";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Recursion utilities

// Closed-form majorant of x_{k+1}^2 <= [(1-A)x_k + C]^2 + B^2, the sharp E/D
// form: x_k <= (1-A)^k x_0 + D/A.
inline double recursion_lemE(double A, double B, double C, double x0,
                             long long k) {
  if (!(A > 0.0) || !(A < 1.0))
    throw std::invalid_argument("need A in (0,1)");
  if (B < 0.0 || C < 0.0 || x0 < 0.0)
    throw std::invalid_argument("need B, C, x0 >= 0");
  const double denom = 2.0 * A - A * A;
  const double E =
      ((1.0 - A) * C + std::sqrt(C * C + denom * B * B)) / denom;
  const double D =
      std::sqrt(std::pow((1.0 - A) * E + C, 2) + B * B) - (1.0 - A) * E;
  return contraction_pow(A, k) * x0 + D / A;
}

// Equality iterate x_{k+1} = sqrt(((1-A)x_k + C)^2 + B^2).
inline double recursion_iterate(double A, double B, double C, double x0,
                                long long k) {
  if (!(A > 0.0) || !(A < 1.0))
    throw std::invalid_argument("need A in (0,1)");
  double x = x0;
  for (long long i = 0; i < k; ++i)
    x = std::sqrt(std::pow((1.0 - A) * x + C, 2) + B * B);
  return x;
}

// Closed-form majorant of x_{k+1} <= sqrt((1-A)^2 x_k^2 + B^2) + C + D x_k,
// for 0 < D < A < 1.
inline double recursion_lemI(double A, double B, double C, double D, double x0,
                             long long k) {
  if (!(D >= 0.0) || !(D < A) || !(A < 1.0))
    throw std::invalid_argument("need 0 <= D < A < 1");
  if (B < 0.0 || C < 0.0 || x0 < 0.0)
    throw std::invalid_argument("need B, C, x0 >= 0");
  return contraction_pow(A - D, k) * x0 + C / (A - D) +
         B / std::sqrt((A - D) * (2.0 - A - D));
}

inline double recursion_lemI_iterate(double A, double B, double C, double D,
                                     double x0, long long k) {
  if (!(D >= 0.0) || !(D < A) || !(A < 1.0))
    throw std::invalid_argument("need 0 <= D < A < 1");
  double x = x0;
  for (long long i = 0; i < k; ++i)
    x = std::sqrt((1.0 - A) * (1.0 - A) * x * x + B * B) + C + D * x;
  return x;
}

// One-step recursion for the noisy chain:
// sqrt((rho W + alpha M sqrt(h^3 p) + h delta sqrt(p))^2 + sigma^2 h^2 p),
// rho = max(1 - mh, Mh - 1), alpha = 7 sqrt(2)/6.
inline double one_step_recursion(double W, double m, double M, double p,
                                 double h, double delta, double sigma) {
  if (!(h > 0.0) || h >= 2.0 / M)
    throw std::invalid_argument("need 0 < h < 2/M");
  const double rho = std::max(1.0 - m * h, M * h - 1.0);
  const double alpha = 7.0 * std::sqrt(2.0) / 6.0;
  const double drift = rho * W + alpha * M * std::sqrt(h * h * h * p) +
                       h * delta * std::sqrt(p);
  return std::sqrt(drift * drift + sigma * sigma * h * h * p);
}

}  // namespace langevin::bounds
