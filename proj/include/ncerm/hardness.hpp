#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ncerm/loss.hpp"
#include "ncerm/random.hpp"

namespace ncerm {

struct Literal {
  int index = 1;  // one-based variable index
  bool positive = true;
};

/// A two-argument conjunction a AND b over distinct variables.
struct Clause {
  Literal a;
  Literal b;
};

struct Max2SatInstance {
  int n_literals = 0;
  std::vector<Clause> clauses;

  int clause_count() const { return static_cast<int>(clauses.size()); }
  /// Throws std::invalid_argument unless indices lie in [1, n], the two
  /// literals of every clause differ, and there is at least one clause.
  void validate() const;
};

/// Row 0 is 1_d / sqrt(d); row i is x'_i / sqrt(d) with x'_ij = +1, -1 or 0
/// as z_i appears positively, negated, or not at all in clause j.
Matrix instance_to_vectors(const Max2SatInstance& inst);

/// (1/(2n+2)) sum_i (min{0, <w, x_i>} + min{0, -<w, x_i>}) over the rows.
double reduction_loss(const Vector& w, const Matrix& vectors);

int satisfied_count(const Max2SatInstance& inst, const std::vector<bool>& assignment);

struct IdentityCheck {
  double lhs = 0.0;  // sum_j (sum_i alpha_i x_ij)^2
  double rhs = 0.0;  // 1 + 8 * satisfied / d under z_i = [alpha_i = alpha_0]
  int satisfied = 0;
  bool holds(double tol = 1e-9) const;
};

/// `alpha` has n + 1 entries in {-1, +1}.
IdentityCheck verify_identity(const Max2SatInstance& inst, const std::vector<int>& alpha);

/// Largest number of simultaneously satisfied clauses by exhausting all
/// 2^n assignments (n <= 20).
struct MaxSatSolution {
  int satisfied = 0;
  std::vector<bool> assignment;
};
MaxSatSolution brute_force_max_sat(const Max2SatInstance& inst);

/// Brute-force oracles are limited to this many variables.
inline constexpr int kMaxBruteForceVariables = 20;

/// Exact minimum of reduction_loss over the unit ball:
/// -(1/(2n+2)) max_alpha ||sum_i alpha_i x_i||.
double reduction_minimum(const Matrix& vectors, Vector* argmin = nullptr);

/// The 2n+2 points +-x_i that turn reduction_loss into the generic loss g.
Matrix paired_points(const Matrix& vectors);

/// g(w) = (1/N) sum_i min{0, <w, x_i>}.
double generic_loss(const Vector& w, const Matrix& points);

/// Exact min of g over the unit ball, -(1/N) max_S ||sum_{i in S} x_i||,
/// by subset enumeration (N <= 20 rows).
double generic_minimum(const Matrix& points, Vector* argmin = nullptr);

/// The (d+1)-dimensional instance built from generic points x_1..x_N:
/// x~_i = (x_i/sqrt2, 1/sqrt2), u = -e/sqrt2, v = e/(2 sqrt2), and
/// l~(w~) = (6N h(<w~,u>) + 6N h(<w~,v>) + sum_i h(<w~,x~_i>)) / (13N)
/// with h the piecewise-linear loss at L = 1.
class LiftedInstance {
 public:
  explicit LiftedInstance(Matrix points);

  Eigen::Index dim() const { return points_.cols() + 1; }
  const Matrix& points() const { return points_; }

  /// l~ at w~ directly from the lifted vectors.
  double operator()(const Vector& w_tilde) const;
  /// l~ at w~ = (alpha/sqrt2, tau/sqrt2) through the split form.
  double at(const Vector& alpha, double tau) const;
  /// Minimum value 11/26 + g* / 26, attained at (w*, 1).
  double optimum() const;
  double generic_optimum() const { return g_star_; }
  const Vector& generic_minimizer() const { return w_star_; }

 private:
  Matrix points_;
  Matrix lifted_;
  double g_star_ = 0.0;
  Vector w_star_;
};

struct ApproximationCheck {
  Vector alpha;
  double tau = 0.0;
  double epsilon = 0.0;     // l~(alpha, tau) - optimum
  double g_star = 0.0;
  double g_rounded = 0.0;   // g(alpha / ||alpha||), with 0/0 = 0
  bool applicable = false;  // epsilon < 1/26
  bool holds = false;       // g_rounded <= g_star + 26 epsilon
};

/// Evaluates the rounding guarantee at a given lifted point.
ApproximationCheck check_rounding(const LiftedInstance& inst, const Vector& alpha, double tau);

/// Minimizes l~ over a uniform grid of `per_axis` points per coordinate of
/// (alpha, tau) inside alpha^2 + tau^2 <= 2 and checks the grid minimizer.
ApproximationCheck grid_rounding_check(const LiftedInstance& inst, int per_axis);

/// (a OR b) as the three conjunctions (a AND b), (~a AND b), (a AND ~b).
std::vector<Clause> expand_disjunction(Literal a, Literal b);
Max2SatInstance from_disjunctions(int n_literals, const std::vector<std::pair<Literal, Literal>>& ors);

Max2SatInstance random_instance(int n_literals, int clause_count, Rng& rng);

/// Text format: "c" comment lines, an optional "p 2sat <n> <d>" header,
/// then one clause per line as two nonzero signed integers with an
/// optional trailing 0. Negative integers are negated literals.
Max2SatInstance read_instance(std::istream& in);
void write_instance(std::ostream& out, const Max2SatInstance& inst);

}  // namespace ncerm
