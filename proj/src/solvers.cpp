#include "ncerm/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace ncerm {

Vector project_l1(const Vector& v, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("projection radius must be non-negative");
  if (v.lpNorm<1>() <= radius) return v;
  if (radius == 0.0) return Vector::Zero(v.size());

  std::vector<double> mu(v.data(), v.data() + v.size());
  for (double& m : mu) m = std::abs(m);
  std::sort(mu.begin(), mu.end(), std::greater<>());

  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    cumulative += mu[j];
    const double candidate = (cumulative - radius) / static_cast<double>(j + 1);
    if (mu[j] - candidate > 0.0) theta = candidate;
  }

  Vector w(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double shrunk = std::max(std::abs(v[i]) - theta, 0.0);
    w[i] = std::copysign(shrunk, v[i]);
  }
  return w;
}

namespace {

// Root of t + c * t^(p-1) = a on [0, a] for c > 0, p in (1, 2). The left side
// is increasing and concave, so safeguarded Newton converges quickly.
double shrink_coordinate(double a, double c, double p) {
  if (a == 0.0) return 0.0;
  double lo = 0.0;
  double hi = a;
  double t = a;
  for (int it = 0; it < 100; ++it) {
    const double tp = std::pow(t, p - 1.0);
    const double phi = t + c * tp - a;
    if (phi > 0.0) {
      hi = t;
    } else {
      lo = t;
    }
    if (hi - lo <= 1e-16 * a) break;
    const double dphi = 1.0 + c * (p - 1.0) * tp / t;
    double next = t - phi / dphi;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == t) break;
    t = next;
  }
  return t;
}

}  // namespace

Vector project_lp(const Vector& v, double p, double radius) {
  if (!(p >= 1.0 && p <= 2.0)) throw std::invalid_argument("project_lp requires p in [1, 2]");
  if (!(radius >= 0.0)) throw std::invalid_argument("projection radius must be non-negative");
  if (p == 1.0) return project_l1(v, radius);
  const double norm = lp_norm(v, p);
  if (norm <= radius) return v;
  if (radius == 0.0) return Vector::Zero(v.size());
  if (p == 2.0) return v * (radius / norm);

  const Vector a = v.cwiseAbs();
  auto shrink = [&](double lambda) {
    Vector t(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) t[i] = shrink_coordinate(a[i], lambda * p, p);
    return t;
  };

  // Bracket the multiplier: norm(shrink(lambda)) decreases in lambda.
  double lo = 0.0;
  double hi = 1.0;
  int doublings = 0;
  while (lp_norm(shrink(hi), p) > radius) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 2000) throw ConvergenceError("project_lp: failed to bracket multiplier");
  }
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      converged = true;
      break;
    }
    if (lp_norm(shrink(mid), p) > radius) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * hi) {
      converged = true;
      break;
    }
  }
  if (!converged) throw ConvergenceError("project_lp: bisection did not converge");

  Vector w = shrink(hi);
  const double w_norm = lp_norm(w, p);
  if (w_norm > radius) w *= radius / w_norm;
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = std::copysign(w[i], v[i]);
  return w;
}

Vector constrained_least_squares(const Matrix& X, const Vector& u, double p, double radius,
                                 bool l1_mode, const LeastSquaresOptions& options) {
  if (X.rows() != u.size()) throw std::invalid_argument("least squares: shape mismatch");
  if (!X.allFinite() || !u.allFinite()) {
    throw NumericError("least squares: non-finite input");
  }
  const double p_eff = l1_mode ? 1.0 : p;
  auto project = [&](const Vector& w) { return project_lp(w, p_eff, radius); };
  auto objective = [&](const Vector& w) { return (X * w - u).squaredNorm(); };

  // The minimum-norm unconstrained solution is optimal whenever it is feasible.
  Vector w = X.completeOrthogonalDecomposition().solve(u);
  if (!w.allFinite()) w = Vector::Zero(X.cols());
  if (lp_norm(w, p_eff) <= radius) return w;
  w = project(w);

  const Matrix gram = X.transpose() * X;
  const double lipschitz =
      2.0 * Eigen::SelfAdjointEigenSolver<Matrix>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  if (!(lipschitz > 0.0)) return w;
  const double step = 1.0 / lipschitz;
  const Vector xtu = X.transpose() * u;

  // Accelerated projected gradient with monotone restart.
  Vector best = w;
  double best_value = objective(w);
  Vector y = w;
  double momentum = 1.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Vector grad = 2.0 * (gram * y - xtu);
    Vector next = project(y - step * grad);
    const double value = objective(next);
    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    if (value > best_value) {
      // Restart from the best iterate without momentum.
      y = best;
      momentum = 1.0;
      continue;
    }
    const double improvement = best_value - value;
    y = next + ((momentum - 1.0) / next_momentum) * (next - w);
    w = next;
    momentum = next_momentum;
    best = next;
    best_value = value;
    if (improvement <= options.rel_tolerance * (1.0 + value) && it > 10) break;
  }
  return best;
}

namespace {

double linear_risk(const Vector& w, const WeightedDataset& data, const LossFunction& loss) {
  return empirical_risk(Vector(data.features() * w), loss, data);
}

Vector linear_risk_gradient(const Vector& w, const WeightedDataset& data,
                            const LossFunction& loss) {
  const Vector scores = data.features() * w;
  Vector coeff(scores.size());
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const double y = data.labels()[i];
    coeff[i] = -data.weights()[i] * y * loss.derivative(-y * scores[i]);
  }
  return data.features().transpose() * coeff;
}

}  // namespace

LinearModel refine(const LinearModel& model, const WeightedDataset& data, const LossFunction& loss,
                   int step_budget, std::vector<double>* trace) {
  LinearModel current = model;
  double value = linear_risk(current.w, data, loss);
  if (trace) trace->push_back(value);
  double step = 1.0;
  for (int it = 0; it < step_budget; ++it) {
    const Vector grad = linear_risk_gradient(current.w, data, loss);
    if (grad.squaredNorm() == 0.0) break;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      Vector candidate = project_lp(current.w - step * grad, current.p_exponent, current.radius);
      const double candidate_value = linear_risk(candidate, data, loss);
      if (candidate_value < value) {
        current.w = std::move(candidate);
        value = candidate_value;
        accepted = true;
        step = std::min(step * 2.0, 1e6);
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    if (trace) trace->push_back(value);
  }
  return current;
}

}  // namespace ncerm
