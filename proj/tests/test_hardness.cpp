#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "ncerm/hardness.hpp"

using namespace ncerm;
using testing::rows;
using testing::vec;

namespace {

Max2SatInstance small_instance() {
  // (z1 & z2), (~z1 & z3), (z2 & ~z3)
  Max2SatInstance inst;
  inst.n_literals = 3;
  inst.clauses = {{{1, true}, {2, true}}, {{1, false}, {3, true}}, {{2, true}, {3, false}}};
  return inst;
}

std::vector<int> signs_of(unsigned mask, int count) {
  std::vector<int> alpha(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) alpha[static_cast<std::size_t>(i)] = (mask >> i) & 1U ? -1 : 1;
  return alpha;
}

double clamp_loss(double z) { return std::clamp(z + 0.5, 0.0, 1.0); }

}  // namespace

TEST_CASE("reduction vectors by hand") {
  const Matrix v = instance_to_vectors(small_instance());
  const double s = 1.0 / std::sqrt(3.0);
  const Matrix expect = rows({{1, 1, 1}, {1, -1, 0}, {1, 0, 1}, {0, 1, -1}}) * s;
  CHECK((v - expect).norm() == 0.0);
  std::vector<bool> z = {true, true, false};
  CHECK(satisfied_count(small_instance(), z) == 2);
  CHECK_THROWS_AS(satisfied_count(small_instance(), {true}), std::invalid_argument);
}

TEST_CASE("instance validation") {
  Max2SatInstance inst = small_instance();
  CHECK_NOTHROW(inst.validate());
  inst.clauses.push_back({{2, true}, {2, false}});
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
  inst = small_instance();
  inst.clauses[0].a.index = 4;
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
  inst.clauses.clear();
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
}

TEST_CASE("norm identity against brute-force clause counting") {
  Rng rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const int d = 1 + static_cast<int>(rng() % 10);
    const Max2SatInstance inst = random_instance(n, d, rng);
    const Matrix v = instance_to_vectors(inst);
    for (unsigned mask = 0; mask < (1U << (n + 1)); ++mask) {
      const std::vector<int> alpha = signs_of(mask, n + 1);
      std::vector<bool> z(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = alpha[static_cast<std::size_t>(i + 1)] == alpha[0];
      const int sat = satisfied_count(inst, z);
      Vector a(n + 1);
      for (int i = 0; i <= n; ++i) a[i] = alpha[static_cast<std::size_t>(i)];
      const IdentityCheck c = verify_identity(inst, alpha);
      CHECK(c.satisfied == sat);
      CHECK(c.lhs == doctest::Approx((v.transpose() * a).squaredNorm()).epsilon(1e-12));
      CHECK(c.rhs == doctest::Approx(1.0 + 8.0 * sat / d).epsilon(1e-12));
      CHECK(c.holds());
    }
  }
  CHECK_THROWS_AS(verify_identity(small_instance(), {1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(verify_identity(small_instance(), {1, 1, 0, 1}), std::invalid_argument);
}

TEST_CASE("negating every sign leaves the identity unchanged") {
  Rng rng(5);
  const Max2SatInstance inst = random_instance(5, 8, rng);
  for (unsigned mask = 0; mask < 64; ++mask) {
    std::vector<int> alpha = signs_of(mask, 6);
    std::vector<int> neg = alpha;
    for (int& a : neg) a = -a;
    const IdentityCheck x = verify_identity(inst, alpha);
    const IdentityCheck y = verify_identity(inst, neg);
    CHECK(x.lhs == doctest::Approx(y.lhs));
    CHECK(x.satisfied == y.satisfied);
  }
}

TEST_CASE("brute-force max-sat") {
  const MaxSatSolution s = brute_force_max_sat(small_instance());
  CHECK(s.satisfied == 2);  // clause 1 needs z1, clause 2 needs ~z1
  CHECK(satisfied_count(small_instance(), s.assignment) == 2);
  Max2SatInstance big;
  big.n_literals = 21;
  big.clauses = {{{1, true}, {2, true}}};
  CHECK_THROWS_AS(brute_force_max_sat(big), std::invalid_argument);
}

TEST_CASE("reduction loss range, symmetry and minimum") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const int d = 1 + static_cast<int>(rng() % 8);
    const Max2SatInstance inst = random_instance(n, d, rng);
    const Matrix v = instance_to_vectors(inst);
    const double scale = 1.0 / (2.0 * n + 2.0);
    Vector argmin;
    const double minimum = reduction_minimum(v, &argmin);
    CHECK(argmin.norm() == doctest::Approx(1.0));
    CHECK(reduction_loss(argmin, v) == doctest::Approx(minimum));
    for (int k = 0; k < 50; ++k) {
      Vector w = unit_sphere(rng, d) * std::sqrt(testing::uniform01(rng));
      const double value = reduction_loss(w, v);
      CHECK(value <= 0.0);
      CHECK(value >= -0.5 - 1e-12);
      CHECK(value == doctest::Approx(reduction_loss(-w, v)));
      CHECK(value >= minimum - 1e-12);
      CHECK(value == doctest::Approx(generic_loss(w, paired_points(v))));
    }
    // The minimum encodes the optimal clause count.
    const double norm = -minimum / scale;
    const double recovered = (norm * norm - 1.0) * d / 8.0;
    CHECK(std::lround(recovered) == brute_force_max_sat(inst).satisfied);
    CHECK(recovered == doctest::Approx(std::round(recovered)).epsilon(1e-9));
  }
}

TEST_CASE("generic minimum against sampled directions") {
  Rng rng(3);
  const Matrix points = rows({{0.6, 0.1}, {-0.3, 0.4}, {0.2, -0.9}, {-0.5, -0.5}, {0.1, 0.1}});
  Vector argmin;
  const double g = generic_minimum(points, &argmin);
  CHECK(generic_loss(argmin, points) == doctest::Approx(g));
  double sampled = 0.0;
  for (int k = 0; k < 20000; ++k) sampled = std::min(sampled, generic_loss(unit_sphere(rng, 2), points));
  CHECK(sampled >= g - 1e-12);
  CHECK(sampled == doctest::Approx(g).epsilon(1e-3));
}

TEST_CASE("lifted instance") {
  Rng rng(8);
  const Max2SatInstance inst = random_instance(3, 3, rng);
  const Matrix points = paired_points(instance_to_vectors(inst));
  const LiftedInstance lifted(points);
  const auto N = static_cast<double>(points.rows());
  const double r = 1.0 / std::sqrt(2.0);

  SUBCASE("value at the lifting point is exactly 11/26") {
    CHECK(lifted.at(Vector::Zero(points.cols()), 1.0) == 11.0 / 26.0);
    Vector w = Vector::Zero(lifted.dim());
    w[w.size() - 1] = r;
    CHECK(lifted(w) == doctest::Approx(11.0 / 26.0).epsilon(1e-15));
  }
  SUBCASE("direct evaluation matches the split form and an independent oracle") {
    for (int k = 0; k < 200; ++k) {
      const Vector alpha = unit_sphere(rng, points.cols()) * testing::uniform01(rng);
      const double tau = 2.0 * testing::uniform01(rng) - 1.0;
      Vector w(lifted.dim());
      w << alpha * r, tau * r;
      double total = 6.0 * N * clamp_loss(-tau / 2.0) + 6.0 * N * clamp_loss(tau / 4.0);
      for (Eigen::Index i = 0; i < points.rows(); ++i) {
        total += clamp_loss((points.row(i).dot(alpha) + tau) / 2.0);
      }
      CHECK(lifted(w) == doctest::Approx(total / (13.0 * N)).epsilon(1e-13));
      CHECK(lifted.at(alpha, tau) == doctest::Approx(lifted(w)).epsilon(1e-13));
    }
  }
  SUBCASE("optimum attained at the lifted minimizer") {
    const Vector& w_star = lifted.generic_minimizer();
    CHECK(lifted.at(w_star, 1.0) == doctest::Approx(11.0 / 26.0 + lifted.generic_optimum() / 26.0).epsilon(1e-14));
    CHECK(lifted.optimum() == doctest::Approx(lifted.at(w_star, 1.0)).epsilon(1e-14));
    for (int k = 0; k < 2000; ++k) {
      Vector w = unit_sphere(rng, lifted.dim()) * std::sqrt(testing::uniform01(rng));
      CHECK(lifted(w) >= lifted.optimum() - 1e-12);
    }
  }
}

TEST_CASE("rounding guarantee on lifted grids") {
  const Matrix points = rows({{0.8, 0.1}, {-0.2, 0.7}, {0.3, -0.6}, {-0.5, -0.4}, {0.1, 0.2}});
  const LiftedInstance lifted(points);
  const ApproximationCheck c = grid_rounding_check(lifted, 21);
  CHECK(c.epsilon >= -1e-12);
  CHECK(c.g_star == lifted.generic_optimum());
  CHECK(c.holds);
  const ApproximationCheck exact = check_rounding(lifted, lifted.generic_minimizer(), 1.0);
  CHECK(exact.epsilon == doctest::Approx(0.0).scale(1.0));
  CHECK(exact.applicable);
  CHECK(exact.holds);
  const ApproximationCheck origin = check_rounding(lifted, Vector::Zero(2), 1.0);
  CHECK(origin.g_rounded == 0.0);
  CHECK(origin.epsilon == doctest::Approx(-lifted.generic_optimum() / 26.0));
  CHECK_THROWS_AS(grid_rounding_check(lifted, 1), std::invalid_argument);
}

TEST_CASE("disjunctions expand to three conjunctions") {
  const std::vector<Clause> c = expand_disjunction({1, true}, {2, false});
  REQUIRE(c.size() == 3);
  // Exactly one conjunction is true whenever the disjunction is, none otherwise.
  for (int mask = 0; mask < 4; ++mask) {
    const std::vector<bool> z = {(mask & 1) != 0, (mask & 2) != 0};
    Max2SatInstance inst;
    inst.n_literals = 2;
    inst.clauses = c;
    const bool disjunction = z[0] || !z[1];
    CHECK(satisfied_count(inst, z) == (disjunction ? 1 : 0));
  }
  const Max2SatInstance inst = from_disjunctions(3, {{{1, true}, {2, true}}, {{2, false}, {3, true}}});
  CHECK(inst.clause_count() == 6);
}

TEST_CASE("random instances") {
  Rng rng(1);
  const Max2SatInstance inst = random_instance(4, 9, rng);
  CHECK(inst.n_literals == 4);
  CHECK(inst.clause_count() == 9);
  CHECK_NOTHROW(inst.validate());
  CHECK_THROWS_AS(random_instance(1, 2, rng), std::invalid_argument);
  CHECK_THROWS_AS(random_instance(3, 0, rng), std::invalid_argument);
}

TEST_CASE("instance files") {
  std::ostringstream out;
  write_instance(out, small_instance());
  CHECK(out.str() == "p 2sat 3 3\n1 2 0\n-1 3 0\n2 -3 0\n");
  std::istringstream in(out.str());
  const Max2SatInstance back = read_instance(in);
  std::ostringstream again;
  write_instance(again, back);
  CHECK(again.str() == out.str());

  std::istringstream bare("c comment\n\n1 -4\n2 3 0\n");
  const Max2SatInstance b = read_instance(bare);
  CHECK(b.n_literals == 4);
  CHECK(b.clause_count() == 2);
  CHECK_FALSE(b.clauses[0].b.positive);

  for (const char* bad : {"p 2sat 3 2\n1 2 0\n", "1 0\n", "1 2 3\n", "p cnf 3 1\n1 2\n", "1 1\n", "", "x y\n"}) {
    std::istringstream s(bad);
    CHECK_THROWS_AS(read_instance(s), std::invalid_argument);
  }
}
