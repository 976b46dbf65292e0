#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "ncerm/data.hpp"
#include "ncerm/random.hpp"
#include "ncerm/solvers.hpp"

using namespace ncerm;
using testing::rows;
using testing::vec;

namespace {

// Closest point to v on the boundary of the 2-D l_p ball of radius C, found
// by a fine angular sweep followed by a ternary search around the best angle.
Vector boundary_oracle(const Vector& v, double p, double c) {
  auto point = [&](double theta) {
    Vector dir = vec({std::cos(theta), std::sin(theta)});
    return Vector(dir * (c / lp_norm(dir, p)));
  };
  auto dist = [&](double theta) { return (point(theta) - v).squaredNorm(); };
  const int sweep = 200000;
  const double step = 2.0 * std::numbers::pi / sweep;
  double best_theta = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < sweep; ++i) {
    const double d = dist(i * step);
    if (d < best) {
      best = d;
      best_theta = i * step;
    }
  }
  double lo = best_theta - step, hi = best_theta + step;
  for (int it = 0; it < 100; ++it) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (dist(m1) < dist(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return point(0.5 * (lo + hi));
}

}  // namespace

TEST_CASE("l1 projection examples") {
  CHECK(project_l1(vec({0.2, -0.3}), 1.0) == vec({0.2, -0.3}));
  CHECK((project_l1(vec({3, 0}), 1.0) - vec({1, 0})).norm() < 1e-15);
  CHECK((project_l1(vec({2, 2}), 2.0) - vec({1, 1})).norm() < 1e-15);
  CHECK((project_l1(vec({-2, 2}), 2.0) - vec({-1, 1})).norm() < 1e-15);
  CHECK(project_l1(vec({1, 1}), 0.0) == vec({0, 0}));
  // Soft thresholding by hand: v = (3, 1, -0.5), B = 2 -> theta = 1.
  CHECK((project_l1(vec({3, 1, -0.5}), 2.0) - vec({2, 0, 0})).norm() < 1e-15);
  CHECK((project_l1(vec({3, 2, -0.5}), 3.0) - vec({2, 1, 0})).norm() < 1e-15);
}

TEST_CASE("lp projection examples") {
  CHECK((project_lp(vec({3, 4}), 2.0, 1.0) - vec({0.6, 0.8})).norm() < 1e-15);
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const Vector v = 3.0 * gaussian_vector(rng, 5);
    CHECK((project_lp(v, 1.0, 1.3) - project_l1(v, 1.3)).norm() <= 1e-9);
  }
  const Vector oracle = boundary_oracle(vec({1, 1}), 1.5, 1.0);
  CHECK((project_lp(vec({1, 1}), 1.5, 1.0) - oracle).norm() <= 1e-4);
  CHECK_THROWS_AS(project_lp(vec({1, 1}), 2.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(project_lp(vec({1, 1}), 1.5, -1.0), std::invalid_argument);
}

TEST_CASE("projections match a 2-D boundary oracle and are idempotent") {
  Rng rng(99);
  std::uniform_real_distribution<double> radius(0.3, 2.0);
  for (double p : {1.0, 1.5, 2.0}) {
    for (int i = 0; i < 50; ++i) {
      const Vector v = 2.0 * gaussian_vector(rng, 2);
      const double c = radius(rng);
      const Vector w = project_lp(v, p, c);
      CHECK(lp_norm(w, p) <= c + 1e-9);
      if (lp_norm(v, p) <= c) {
        CHECK(w == v);
      } else {
        CHECK((w - boundary_oracle(v, p, c)).norm() <= 1e-4);
      }
      CHECK((project_lp(w, p, c) - w).norm() <= 1e-9);
    }
  }
  for (int i = 0; i < 100; ++i) {
    const Vector v = 2.0 * gaussian_vector(rng, 6);
    const Vector w = project_l1(v, 1.0);
    CHECK((project_l1(w, 1.0) - w).norm() <= 1e-9);
  }
}

TEST_CASE("lp projection in higher dimension beats random feasible points") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector v = 2.0 * gaussian_vector(rng, 6);
    const Vector w = project_lp(v, 1.3, 1.0);
    const double best = (w - v).norm();
    for (int j = 0; j < 2000; ++j) {
      const Vector z = project_lp(3.0 * gaussian_vector(rng, 6), 1.3, 1.0);
      CHECK(best <= (z - v).norm() + 1e-9);
    }
  }
}

TEST_CASE("constrained least squares examples") {
  const Matrix id = Matrix::Identity(2, 2);
  CHECK((constrained_least_squares(id, vec({0.3, -0.4}), 2.0, 1.0) - vec({0.3, -0.4})).norm() < 1e-12);
  CHECK((constrained_least_squares(id, vec({3, 0}), 2.0, 1.0) - vec({1, 0})).norm() < 1e-6);
  CHECK((constrained_least_squares(id, vec({3, 0}), 1.5, 1.0) - vec({1, 0})).norm() < 1e-6);
  CHECK_THROWS_AS(constrained_least_squares(id, vec({std::nan(""), 0}), 2.0, 1.0), NumericError);
  CHECK_THROWS_AS(constrained_least_squares(id, vec({1, 0, 0}), 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("constrained least squares against a grid oracle") {
  Rng rng(31);
  for (double p : {1.0, 1.5, 2.0}) {
    for (int trial = 0; trial < 10; ++trial) {
      Matrix x(3, 2);
      for (Eigen::Index i = 0; i < 3; ++i) x.row(i) = gaussian_vector(rng, 2).transpose();
      const Vector u = 2.0 * gaussian_vector(rng, 3);
      const Vector w = constrained_least_squares(x, u, p, 1.0);
      CHECK(lp_norm(w, p) <= 1.0 + 1e-9);
      const double residual = (x * w - u).squaredNorm();
      double grid_best = std::numeric_limits<double>::infinity();
      for (int a = 0; a <= 200; ++a) {
        for (int b = 0; b <= 200; ++b) {
          const Vector z = vec({-1.0 + a / 100.0, -1.0 + b / 100.0});
          if (lp_norm(z, p) > 1.0) continue;
          grid_best = std::min(grid_best, (x * z - u).squaredNorm());
        }
      }
      CHECK(residual <= grid_best + 1e-8 * (1.0 + grid_best));
    }
  }
}

TEST_CASE("l1 mode ignores p and stays feasible") {
  Rng rng(8);
  Matrix x(4, 3);
  for (Eigen::Index i = 0; i < 4; ++i) x.row(i) = gaussian_vector(rng, 3).transpose();
  const Vector u = 3.0 * gaussian_vector(rng, 4);
  const Vector a = constrained_least_squares(x, u, 2.0, 0.7, true);
  const Vector b = constrained_least_squares(x, u, 1.0, 0.7);
  CHECK(a.lpNorm<1>() <= 0.7 + 1e-9);
  CHECK((a - b).norm() <= 1e-6);
}

TEST_CASE("constrained least squares feasible under a tiny iteration budget") {
  Rng rng(12);
  Matrix x(6, 4);
  for (Eigen::Index i = 0; i < 6; ++i) x.row(i) = gaussian_vector(rng, 4).transpose();
  const Vector u = 5.0 * gaussian_vector(rng, 6);
  for (double p : {1.0, 1.4, 2.0}) {
    const Vector w = constrained_least_squares(x, u, p, 0.5, false, {2, 1e-8});
    CHECK(lp_norm(w, p) <= 0.5 + 1e-9);
  }
}

TEST_CASE("refinement never worsens the loss and stays feasible") {
  const PlantedHalfspace ph = planted_halfspace(5, 200, 0.3, 2.0, 3);
  const LossFunction h = LossFunction::piecewise_linear(1.0);
  Rng rng(2);

  SUBCASE("zero budget is the identity") {
    LinearModel m{0.5 * unit_sphere(rng, 5), 2.0, 1.0};
    const LinearModel r = refine(m, ph.data, h, 0);
    CHECK(r.w == m.w);
  }
  SUBCASE("monotone trace from random starts") {
    for (double p : {1.0, 1.5, 2.0}) {
      for (int t = 0; t < 5; ++t) {
        LinearModel m{project_lp(gaussian_vector(rng, 5), p, 1.0), p, 1.0};
        std::vector<double> trace;
        const LinearModel r = refine(m, ph.data, h, 50, &trace);
        CHECK(r.feasible());
        for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-12);
        CHECK(empirical_risk(r.scores(ph.data.features()), h, ph.data) <=
              empirical_risk(m.scores(ph.data.features()), h, ph.data) + 1e-12);
      }
    }
  }
  SUBCASE("start near the planted separator") {
    LinearModel m{project_lp(ph.separator.w + 0.05 * gaussian_vector(rng, 5), 2.0, 1.0), 2.0, 1.0};
    const double before = empirical_risk(m.scores(ph.data.features()), h, ph.data);
    const LinearModel r = refine(m, ph.data, h, 100);
    CHECK(empirical_risk(r.scores(ph.data.features()), h, ph.data) <= before);
  }
  SUBCASE("logistic loss actually moves") {
    const LossFunction s = LossFunction::logistic_sigmoid(1.0);
    LinearModel m{Vector::Zero(5), 2.0, 1.0};
    const LinearModel r = refine(m, ph.data, s, 20);
    CHECK(empirical_risk(r.scores(ph.data.features()), s, ph.data) < 0.5);
  }
}
