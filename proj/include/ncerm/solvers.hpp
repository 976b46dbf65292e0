#pragma once

#include <vector>

#include "ncerm/loss.hpp"

namespace ncerm {

/// x -> <w, x> with ||w||_p <= radius.
struct LinearModel {
  Vector w;
  double p_exponent = 2.0;
  double radius = 1.0;

  double operator()(const Vector& x) const { return w.dot(x); }
  Vector scores(const Matrix& features) const { return features * w; }
  bool feasible(double tol = 1e-9) const { return lp_norm(w, p_exponent) <= radius + tol; }
};

/// Raised when an iterative solver fails to reach its bracketing tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Euclidean projection onto {w : ||w||_1 <= radius} (sort-based, exact).
Vector project_l1(const Vector& v, double radius);

/// Euclidean projection onto {w : ||w||_p <= radius}, p in [1, 2].
/// p = 2 rescales, p = 1 defers to project_l1, and p in (1, 2) bisects on the
/// KKT multiplier.
Vector project_lp(const Vector& v, double p, double radius);

struct LeastSquaresOptions {
  int max_iterations = 500;
  double rel_tolerance = 1e-8;
};

/// argmin_{||w||_p <= radius} ||X w - u||^2. With `l1_mode` the constraint
/// is ||w||_1 <= radius regardless of p. The result is always feasible.
Vector constrained_least_squares(const Matrix& X, const Vector& u, double p, double radius,
                                 bool l1_mode = false, const LeastSquaresOptions& options = {});

/// Projected gradient descent on the surrogate risk with backtracking.
/// Only loss-decreasing steps are accepted, so the output is feasible and
/// never has higher risk than the input. `trace`, when given, receives the
/// risk after initialization and after each accepted step.
LinearModel refine(const LinearModel& model, const WeightedDataset& data, const LossFunction& loss,
                   int step_budget, std::vector<double>* trace = nullptr);

}  // namespace ncerm
