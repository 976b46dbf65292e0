#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace ncerm {

using Rng = std::mt19937_64;

// splitmix64 finalizer; maps (master, stream, index) to a well-mixed seed so
// that per-round and per-component generators are independent of execution
// order.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t index = 0) {
  return mix64(mix64(master ^ mix64(stream)) + index);
}

/// Well-known stream tags, one per consumer of the master seed.
namespace stream {
inline constexpr std::uint64_t kAlgorithm1 = 1;
inline constexpr std::uint64_t kResampledRounds = 2;  // least-squares initialized rounds
inline constexpr std::uint64_t kBoostRound = 4;
inline constexpr std::uint64_t kData = 5;
inline constexpr std::uint64_t kLabels = 6;
inline constexpr std::uint64_t kBackprop = 7;
inline constexpr std::uint64_t kAnalysis = 8;
inline constexpr std::uint64_t kHardness = 9;
}  // namespace stream

inline Eigen::VectorXd uniform_cube(Rng& rng, Eigen::Index k, double half_width) {
  std::uniform_real_distribution<double> dist(-half_width, half_width);
  Eigen::VectorXd u(k);
  for (Eigen::Index j = 0; j < k; ++j) u[j] = dist(rng);
  return u;
}

inline Eigen::VectorXd gaussian_vector(Rng& rng, Eigen::Index d) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd g(d);
  for (Eigen::Index j = 0; j < d; ++j) g[j] = dist(rng);
  return g;
}

/// Uniform draw from the unit sphere of R^d (normalized Gaussian).
inline Eigen::VectorXd unit_sphere(Rng& rng, Eigen::Index d) {
  Eigen::VectorXd g;
  double norm = 0.0;
  do {
    g = gaussian_vector(rng, d);
    norm = g.norm();
  } while (norm == 0.0);
  return g / norm;
}

}  // namespace ncerm
