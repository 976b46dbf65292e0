#include "ncerm/hardness.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ncerm {

void Max2SatInstance::validate() const {
  if (n_literals < 1) throw std::invalid_argument("instance needs at least one variable");
  if (clauses.empty()) throw std::invalid_argument("instance needs at least one clause");
  for (const auto& c : clauses) {
    for (const Literal& l : {c.a, c.b}) {
      if (l.index < 1 || l.index > n_literals) {
        throw std::invalid_argument("literal index out of range: " + std::to_string(l.index));
      }
    }
    if (c.a.index == c.b.index) {
      throw std::invalid_argument("clause must use two distinct variables");
    }
  }
}

Matrix instance_to_vectors(const Max2SatInstance& inst) {
  inst.validate();
  const int d = inst.clause_count();
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  Matrix x = Matrix::Zero(inst.n_literals + 1, d);
  x.row(0).setConstant(scale);
  for (int j = 0; j < d; ++j) {
    const Clause& c = inst.clauses[static_cast<std::size_t>(j)];
    x(c.a.index, j) = c.a.positive ? scale : -scale;
    x(c.b.index, j) = c.b.positive ? scale : -scale;
  }
  return x;
}

double reduction_loss(const Vector& w, const Matrix& vectors) {
  if (w.size() != vectors.cols()) throw std::invalid_argument("reduction_loss: dimension mismatch");
  const Vector inner = vectors * w;
  double total = 0.0;
  for (Eigen::Index i = 0; i < inner.size(); ++i) {
    total += std::min(0.0, inner[i]) + std::min(0.0, -inner[i]);
  }
  return total / static_cast<double>(2 * vectors.rows());
}

int satisfied_count(const Max2SatInstance& inst, const std::vector<bool>& assignment) {
  if (assignment.size() != static_cast<std::size_t>(inst.n_literals)) {
    throw std::invalid_argument("assignment size must equal the variable count");
  }
  auto value = [&](const Literal& l) {
    return assignment[static_cast<std::size_t>(l.index - 1)] == l.positive;
  };
  int count = 0;
  for (const auto& c : inst.clauses) count += (value(c.a) && value(c.b)) ? 1 : 0;
  return count;
}

bool IdentityCheck::holds(double tol) const { return std::abs(lhs - rhs) <= tol; }

IdentityCheck verify_identity(const Max2SatInstance& inst, const std::vector<int>& alpha) {
  if (alpha.size() != static_cast<std::size_t>(inst.n_literals + 1)) {
    throw std::invalid_argument("alpha must have n + 1 entries");
  }
  for (int a : alpha) {
    if (a != 1 && a != -1) throw std::invalid_argument("alpha entries must be +1 or -1");
  }
  const Matrix x = instance_to_vectors(inst);
  Vector a(static_cast<Eigen::Index>(alpha.size()));
  for (std::size_t i = 0; i < alpha.size(); ++i) a[static_cast<Eigen::Index>(i)] = alpha[i];
  const Vector combined = x.transpose() * a;

  std::vector<bool> z(static_cast<std::size_t>(inst.n_literals));
  for (int i = 1; i <= inst.n_literals; ++i) z[static_cast<std::size_t>(i - 1)] = alpha[i] == alpha[0];

  IdentityCheck check;
  check.lhs = combined.squaredNorm();
  check.satisfied = satisfied_count(inst, z);
  check.rhs = 1.0 + 8.0 * check.satisfied / inst.clause_count();
  return check;
}

MaxSatSolution brute_force_max_sat(const Max2SatInstance& inst) {
  inst.validate();
  if (inst.n_literals > kMaxBruteForceVariables) {
    throw std::invalid_argument("brute force is limited to 20 variables");
  }
  const auto n = static_cast<std::size_t>(inst.n_literals);
  MaxSatSolution best;
  best.satisfied = -1;
  std::vector<bool> z(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i) z[i] = ((mask >> i) & 1U) != 0;
    const int count = satisfied_count(inst, z);
    if (count > best.satisfied) {
      best.satisfied = count;
      best.assignment = z;
    }
  }
  return best;
}

namespace {

// max over sign patterns (first sign fixed) of ||sum_i s_i x_i||.
double best_signed_sum(const Matrix& rows, Vector* direction) {
  const auto m = static_cast<std::size_t>(rows.rows());
  if (m == 0) throw std::invalid_argument("no vectors");
  if (m > kMaxBruteForceVariables + 1) throw std::invalid_argument("too many vectors to enumerate");
  double best = -1.0;
  Vector best_sum;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (m - 1)); ++mask) {
    Vector sum = rows.row(0).transpose();
    for (std::size_t i = 1; i < m; ++i) {
      const double sign = ((mask >> (i - 1)) & 1U) ? -1.0 : 1.0;
      sum += sign * rows.row(static_cast<Eigen::Index>(i)).transpose();
    }
    const double norm = sum.norm();
    if (norm > best) {
      best = norm;
      best_sum = std::move(sum);
    }
  }
  if (direction) {
    *direction = best > 0.0 ? Vector(-best_sum / best) : Vector(Vector::Zero(rows.cols()));
  }
  return best;
}

}  // namespace

double reduction_minimum(const Matrix& vectors, Vector* argmin) {
  const double best = best_signed_sum(vectors, argmin);
  return -best / static_cast<double>(2 * vectors.rows());
}

Matrix paired_points(const Matrix& vectors) {
  Matrix out(2 * vectors.rows(), vectors.cols());
  out.topRows(vectors.rows()) = vectors;
  out.bottomRows(vectors.rows()) = -vectors;
  return out;
}

double generic_loss(const Vector& w, const Matrix& points) {
  if (w.size() != points.cols()) throw std::invalid_argument("generic_loss: dimension mismatch");
  const Vector inner = points * w;
  double total = 0.0;
  for (Eigen::Index i = 0; i < inner.size(); ++i) total += std::min(0.0, inner[i]);
  return total / static_cast<double>(points.rows());
}

double generic_minimum(const Matrix& points, Vector* argmin) {
  const auto m = static_cast<std::size_t>(points.rows());
  if (m == 0) throw std::invalid_argument("no points");
  if (m > kMaxBruteForceVariables) throw std::invalid_argument("too many points to enumerate");
  double best = 0.0;
  Vector best_sum = Vector::Zero(points.cols());
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    Vector sum = Vector::Zero(points.cols());
    for (std::size_t i = 0; i < m; ++i) {
      if ((mask >> i) & 1U) sum += points.row(static_cast<Eigen::Index>(i)).transpose();
    }
    const double norm = sum.norm();
    if (norm > best) {
      best = norm;
      best_sum = std::move(sum);
    }
  }
  if (argmin) *argmin = best > 0.0 ? Vector(-best_sum / best) : best_sum;
  return -best / static_cast<double>(m);
}

LiftedInstance::LiftedInstance(Matrix points) : points_(std::move(points)) {
  if (points_.rows() == 0) throw std::invalid_argument("lifted instance needs points");
  const double r = 1.0 / std::sqrt(2.0);
  lifted_.resize(points_.rows(), points_.cols() + 1);
  lifted_.leftCols(points_.cols()) = points_ * r;
  lifted_.col(points_.cols()).setConstant(r);
  g_star_ = generic_minimum(points_, &w_star_);
}

namespace {

double combine(double n, double hu, double hv, double sum_h) {
  return (6.0 * n * hu + 6.0 * n * hv + sum_h) / (13.0 * n);
}

}  // namespace

double LiftedInstance::operator()(const Vector& w_tilde) const {
  if (w_tilde.size() != dim()) throw std::invalid_argument("lifted instance: dimension mismatch");
  const LossFunction h = LossFunction::piecewise_linear(1.0);
  const double last = w_tilde[w_tilde.size() - 1];
  const double r = 1.0 / std::sqrt(2.0);
  const double hu = h(-last * r);
  const double hv = h(last * r / 2.0);
  const Vector inner = lifted_ * w_tilde;
  double sum_h = 0.0;
  for (Eigen::Index i = 0; i < inner.size(); ++i) sum_h += h(inner[i]);
  return combine(static_cast<double>(points_.rows()), hu, hv, sum_h);
}

double LiftedInstance::at(const Vector& alpha, double tau) const {
  if (alpha.size() != points_.cols()) throw std::invalid_argument("lifted instance: dimension mismatch");
  const LossFunction h = LossFunction::piecewise_linear(1.0);
  const Vector inner = points_ * alpha;
  double sum_h = 0.0;
  for (Eigen::Index i = 0; i < inner.size(); ++i) sum_h += h(inner[i] / 2.0 + tau / 2.0);
  return combine(static_cast<double>(points_.rows()), h(-tau / 2.0), h(tau / 4.0), sum_h);
}

double LiftedInstance::optimum() const { return 11.0 / 26.0 + g_star_ / 26.0; }

ApproximationCheck check_rounding(const LiftedInstance& inst, const Vector& alpha, double tau) {
  ApproximationCheck check;
  check.alpha = alpha;
  check.tau = tau;
  check.epsilon = inst.at(alpha, tau) - inst.optimum();
  check.g_star = inst.generic_optimum();
  const double norm = alpha.norm();
  const Vector direction = norm > 0.0 ? Vector(alpha / norm) : Vector(Vector::Zero(alpha.size()));
  check.g_rounded = generic_loss(direction, inst.points());
  check.applicable = check.epsilon < 1.0 / 26.0;
  // Small slack absorbs rounding in the two loss evaluations.
  check.holds = check.g_rounded <= check.g_star + 26.0 * std::max(0.0, check.epsilon) + 1e-12;
  return check;
}

ApproximationCheck grid_rounding_check(const LiftedInstance& inst, int per_axis) {
  if (per_axis < 2) throw std::invalid_argument("grid needs at least two points per axis");
  const auto d = static_cast<std::size_t>(inst.points().cols());
  const double limit = std::sqrt(2.0);
  const double step = 2.0 * limit / (per_axis - 1);
  std::vector<int> idx(d + 1, 0);
  double best = std::numeric_limits<double>::infinity();
  Vector best_alpha = Vector::Zero(static_cast<Eigen::Index>(d));
  double best_tau = 0.0;
  Vector alpha(static_cast<Eigen::Index>(d));
  while (true) {
    for (std::size_t c = 0; c < d; ++c) alpha[static_cast<Eigen::Index>(c)] = -limit + step * idx[c];
    const double tau = -limit + step * idx[d];
    if (alpha.squaredNorm() + tau * tau <= 2.0 + 1e-12) {
      const double value = inst.at(alpha, tau);
      if (value < best) {
        best = value;
        best_alpha = alpha;
        best_tau = tau;
      }
    }
    std::size_t c = 0;
    while (c <= d && ++idx[c] == per_axis) idx[c++] = 0;
    if (c > d) break;
  }
  return check_rounding(inst, best_alpha, best_tau);
}

std::vector<Clause> expand_disjunction(Literal a, Literal b) {
  const Literal na{a.index, !a.positive};
  const Literal nb{b.index, !b.positive};
  return {Clause{a, b}, Clause{na, b}, Clause{a, nb}};
}

Max2SatInstance from_disjunctions(int n_literals,
                                  const std::vector<std::pair<Literal, Literal>>& ors) {
  Max2SatInstance inst;
  inst.n_literals = n_literals;
  for (const auto& [a, b] : ors) {
    for (const Clause& c : expand_disjunction(a, b)) inst.clauses.push_back(c);
  }
  inst.validate();
  return inst;
}

Max2SatInstance random_instance(int n_literals, int clause_count, Rng& rng) {
  if (n_literals < 2) throw std::invalid_argument("random instances need at least two variables");
  if (clause_count < 1) throw std::invalid_argument("clause count must be positive");
  Max2SatInstance inst;
  inst.n_literals = n_literals;
  std::uniform_int_distribution<int> var(1, n_literals);
  std::bernoulli_distribution sign(0.5);
  for (int j = 0; j < clause_count; ++j) {
    const int a = var(rng);
    int b = var(rng);
    while (b == a) b = var(rng);
    inst.clauses.push_back(Clause{Literal{a, sign(rng)}, Literal{b, sign(rng)}});
  }
  return inst;
}

Max2SatInstance read_instance(std::istream& in) {
  Max2SatInstance inst;
  int declared_n = 0;
  long declared_d = -1;
  int max_index = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    if (first == "c") continue;
    if (first == "p") {
      std::string kind;
      if (!(fields >> kind >> declared_n >> declared_d) || kind != "2sat" || declared_n < 1) {
        throw std::invalid_argument("malformed header on line " + std::to_string(line_no));
      }
      continue;
    }
    std::istringstream all(line);
    long a = 0, b = 0, terminator = 0;
    if (!(all >> a >> b) || a == 0 || b == 0) {
      throw std::invalid_argument("malformed clause on line " + std::to_string(line_no));
    }
    if (all >> terminator && terminator != 0) {
      throw std::invalid_argument("clause on line " + std::to_string(line_no) +
                                  " has more than two literals");
    }
    const auto lit = [](long v) { return Literal{static_cast<int>(std::labs(v)), v > 0}; };
    inst.clauses.push_back(Clause{lit(a), lit(b)});
    max_index = std::max<int>(max_index, static_cast<int>(std::max(std::labs(a), std::labs(b))));
  }
  inst.n_literals = declared_n > 0 ? declared_n : max_index;
  if (declared_d >= 0 && declared_d != inst.clause_count()) {
    throw std::invalid_argument("header clause count does not match the file");
  }
  inst.validate();
  return inst;
}

void write_instance(std::ostream& out, const Max2SatInstance& inst) {
  out << "p 2sat " << inst.n_literals << ' ' << inst.clause_count() << '\n';
  for (const auto& c : inst.clauses) {
    out << (c.a.positive ? c.a.index : -c.a.index) << ' '
        << (c.b.positive ? c.b.index : -c.b.index) << " 0\n";
  }
}

}  // namespace ncerm
