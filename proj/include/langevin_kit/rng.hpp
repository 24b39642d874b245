#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace langevin {

using Rng = std::mt19937_64;

// splitmix64 step, used to derive independent stream seeds from one user seed.
inline std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream `id` of a seeded generator family. Distinct ids give generators
// whose states never share seed material.
inline Rng make_stream(std::uint64_t seed, std::uint64_t id) {
  std::uint64_t s = seed;
  for (std::uint64_t i = 0; i <= id; ++i) splitmix64(s);
  return Rng(splitmix64(s));
}

// Uniform in (0, 1], built from the top 53 bits of the engine output so the
// mapping is fully specified (std distributions are implementation-defined).
inline double uniform01(Rng& g) {
  return static_cast<double>((g() >> 11) + 1) * 0x1.0p-53;
}

inline std::size_t uniform_index(Rng& g, std::size_t n) {
  return static_cast<std::size_t>(g() % n);
}

// Standard normal via Box-Muller on the uniform above. This is the fixed
// Gaussian draw method of the whole library; traces are reproducible given
// (seed, stream id) alone.
inline double standard_normal(Rng& g) {
  const double u1 = uniform01(g);
  const double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline Eigen::VectorXd normal_vector(Rng& g, Eigen::Index p) {
  Eigen::VectorXd z(p);
  Eigen::Index i = 0;
  while (i + 1 < p) {
    const double u1 = uniform01(g);
    const double u2 = uniform01(g);
    const double r = std::sqrt(-2.0 * std::log(u1));
    z[i++] = r * std::cos(2.0 * M_PI * u2);
    z[i++] = r * std::sin(2.0 * M_PI * u2);
  }
  if (i < p) z[i] = standard_normal(g);
  return z;
}

}  // namespace langevin
