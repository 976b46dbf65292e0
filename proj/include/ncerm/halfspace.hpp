#pragma once

#include <cstdint>
#include <functional>

#include "ncerm/data.hpp"
#include "ncerm/loss.hpp"
#include "ncerm/solvers.hpp"

namespace ncerm {

/// A round count from a closed-form bound that can be astronomically large.
struct RoundCount {
  double log_value = 0.0;  // natural log of the bound before rounding up
  double value = 1.0;      // the rounded-up bound; +inf past double range

  /// ceil(coefficient * base^exponent * log_factor).
  static RoundCount from_power(double coefficient, double base, double exponent,
                               double log_factor);
  std::uint64_t capped(std::uint64_t cap) const;
};

struct HalfspaceRunConfig {
  double epsilon = 0.1;
  double delta = 0.1;
  int s = 0;             // projected dimension (uniform-sphere variant)
  double r = 1.0;        // sphere radius sqrt(d/s)
  int k = 0;             // resample size (least-squares variant)
  double p = 2.0;        // constraint exponent ||w||_p <= radius
  double radius = 1.0;   // ball radius and half-width of the target cube
  RoundCount t_theory;
  std::uint64_t t_budget = 1;
  std::uint64_t seed = 0;

  /// Rounds actually executed: min(T_theory, T_budget).
  std::uint64_t rounds() const { return t_theory.capped(t_budget); }
};

/// s = min{d, ceil(12 ln(n+2) / eps^2)}, r = sqrt(d/s),
/// T = ceil((2n+4) (pi/eps)^(s-1) ln(1/delta)).
HalfspaceRunConfig config_alg1(std::size_t n, int d, double epsilon, double delta);

/// k = ceil(2 ln d / eps^2) for p = 1, else ceil((q-1) / eps^2);
/// T = ceil(5 (4/eps)^k ln(1/delta)).
HalfspaceRunConfig config_alg2(std::size_t n, int d, double p, double epsilon, double delta);

struct HalfspaceOptions {
  int refine_budget = 0;
  /// Replaces the uniform cube draw of the least-squares target (tests only).
  std::function<Vector(const SampleBatch&, Rng&)> target_override;
  /// Called with every round's candidate after refinement.
  std::function<void(std::uint64_t round, const LinearModel&, double loss)> on_round;
};

struct HalfspaceResult {
  LinearModel model;
  double loss = 0.0;
  std::uint64_t rounds = 0;
  std::uint64_t best_round = 0;
};

/// Best of T rounds of w = r u with u uniform on the unit sphere, each
/// optionally refined inside the radius-r ball.
HalfspaceResult algorithm1(const WeightedDataset& data, const LossFunction& loss,
                           const HalfspaceRunConfig& config, const HalfspaceOptions& options = {});

/// Best of T rounds of: resample k points by weight, draw u in the cube,
/// solve the l_p-constrained least squares fit to u, optionally refine.
HalfspaceResult algorithm2(const WeightedDataset& data, const LossFunction& loss,
                           const HalfspaceRunConfig& config, const HalfspaceOptions& options = {});

}  // namespace ncerm
