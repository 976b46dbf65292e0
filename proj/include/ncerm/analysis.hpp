#pragma once

#include <cstdint>
#include <vector>

#include "ncerm/loss.hpp"

namespace ncerm {

/// Monte-Carlo mean with its standard error.
struct RademacherEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  std::size_t k = 0;
};

/// E[max_f (1/k) sum_j eps_j f(x_j)] over fresh sign vectors. Row c of
/// `values` holds candidate c evaluated on the k batch points. The zero
/// function is always part of the maximum, so the estimate is >= 0.
RademacherEstimate rademacher_estimate(const Matrix& values, std::size_t trials, std::uint64_t seed);
RademacherEstimate rademacher_estimate(const std::vector<Predictor>& candidates, const Matrix& batch,
                                       std::size_t trials, std::uint64_t seed);

struct GeneralizationGap {
  double mean_gap = 0.0;  // mean over trials of max_f |G(f) - l(f)|
  double gap_std_error = 0.0;
  RademacherEstimate complexity;  // on batches drawn the same way
  double bound = 0.0;             // 4 L (R + 3 stderr)
  bool within_bound() const { return mean_gap <= bound; }
};

/// Each trial draws k points by importance weight, compares the sample loss
/// G(f) with the weighted loss l(f) for every candidate (plus the zero
/// function), and records the largest deviation.
GeneralizationGap generalization_gap_check(const std::vector<Predictor>& candidates,
                                           const LossFunction& loss, const WeightedDataset& data,
                                           std::size_t k, std::size_t trials, std::uint64_t seed);

struct JlCheck {
  int s = 0;  // min{d, ceil(12 ln n / eps^2)}
  std::size_t successes = 0;
  std::size_t trials = 0;
  double frequency = 0.0;
  double std_error = 0.0;  // binomial sqrt(f (1 - f) / trials)
  double worst_distortion = 0.0;  // largest relative distortion seen in any trial
};

/// Projects the rows of `points` onto random s-dimensional subspaces,
/// rescales by sqrt(d/s), and counts trials in which every pairwise squared
/// distance moves by at most eps relative.
JlCheck jl_distortion_check(const Matrix& points, double epsilon, std::size_t trials,
                            std::uint64_t seed);

struct MaureyCheck {
  double mean_squared_error = 0.0;
  double std_error = 0.0;
  double bound = 0.0;  // b^2 / s
  bool within_bound() const { return mean_squared_error <= bound + 3.0 * std_error; }
};

/// Rows of `atoms` are points of norm <= b; `weights` is a convex
/// combination. Each trial averages s atoms drawn i.i.d. by weight.
MaureyCheck maurey_sparsify(const Matrix& atoms, const Vector& weights, double b, int s,
                            std::size_t trials, std::uint64_t seed);

}  // namespace ncerm
