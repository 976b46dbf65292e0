#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "helpers.hpp"
#include "ncerm/loss.hpp"
#include "ncerm/random.hpp"

using namespace ncerm;
using testing::rows;
using testing::vec;

TEST_CASE("piecewise-linear loss hits its breakpoints exactly") {
  for (double L : {0.5, 1.0, 2.0, 4.0}) {
    const LossFunction h = LossFunction::piecewise_linear(L);
    CHECK(h(-1.0 / (2.0 * L)) == 0.0);
    CHECK(h(0.0) == 0.5);
    CHECK(h(1.0 / (2.0 * L)) == 1.0);
    CHECK(h(-10.0) == 0.0);
    CHECK(h(10.0) == 1.0);
  }
  CHECK(LossFunction::piecewise_linear(2.0)(0.1) == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("logistic and neg_min closed forms") {
  for (double L : {0.25, 1.0, 3.0}) {
    CHECK(LossFunction::logistic_sigmoid(L)(0.0) == 0.5);
    CHECK(LossFunction::logistic_sigmoid(L)(0.3) ==
          doctest::Approx(1.0 / (1.0 + std::exp(-1.2 * L))));
  }
  const LossFunction m = LossFunction::neg_min();
  CHECK(m(-2.5) == -2.5);
  CHECK(m(0.0) == 0.0);
  CHECK(m(3.0) == 0.0);
}

TEST_CASE("every loss kind is L-Lipschitz on random pairs") {
  Rng rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const LossFunction losses[] = {LossFunction::piecewise_linear(1.0), LossFunction::piecewise_linear(2.5),
                                 LossFunction::logistic_sigmoid(1.0), LossFunction::logistic_sigmoid(0.3),
                                 LossFunction::neg_min()};
  for (const auto& h : losses) {
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double a = u(rng), b = u(rng);
      worst = std::max(worst, std::abs(h(a) - h(b)) - h.lipschitz() * std::abs(a - b));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("activations are odd, 1-Lipschitz and bounded") {
  Rng rng(3);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (Activation a : {Activation::tanh, Activation::erf, Activation::clamp}) {
    for (int i = 0; i < 5000; ++i) {
      const double x = u(rng), y = u(rng);
      CHECK(activate(a, -x) == -activate(a, x));
      CHECK(std::abs(activate(a, x)) <= 1.0);
      CHECK(std::abs(activate(a, x) - activate(a, y)) <= std::abs(x - y) + 1e-12);
    }
    CHECK(parse_activation(to_string(a)) == a);
  }
  // Slope of the rescaled erf at the origin.
  CHECK((activate(Activation::erf, 1e-6) / 1e-6) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(parse_activation("relu"), std::invalid_argument);
}

TEST_CASE("derivatives agree with central differences away from kinks") {
  const LossFunction losses[] = {LossFunction::piecewise_linear(1.5), LossFunction::logistic_sigmoid(1.0),
                                 LossFunction::neg_min(), LossFunction::from_activation(Activation::erf)};
  for (const auto& h : losses) {
    for (double t : {-0.9, -0.13, 0.07, 0.21, 0.8}) {
      const double fd = (h(t + 1e-6) - h(t - 1e-6)) / 2e-6;
      CHECK(h.derivative(t) == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("parse_loss accepts every name") {
  CHECK(parse_loss("piecewise_linear", 2.0).kind() == LossKind::piecewise_linear);
  CHECK(parse_loss("logistic_sigmoid", 1.0).kind() == LossKind::logistic_sigmoid);
  CHECK(parse_loss("neg_min", 1.0).kind() == LossKind::neg_min);
  CHECK(parse_loss("tanh", 1.0).kind() == LossKind::activation);
  CHECK_THROWS_AS(parse_loss("hinge", 1.0), std::invalid_argument);
  CHECK_THROWS_AS(LossFunction::piecewise_linear(0.0), std::invalid_argument);
}

TEST_CASE("weighted dataset validation") {
  const Matrix x = rows({{0.5, 0.0}, {0.0, -0.5}});
  CHECK_NOTHROW(WeightedDataset(x, vec({1, -1}), vec({0.25, 0.75})));
  CHECK_THROWS_AS(WeightedDataset(x, vec({1, 0}), vec({0.5, 0.5})), std::invalid_argument);
  CHECK_THROWS_AS(WeightedDataset(x, vec({1, -1}), vec({0.5, 0.6})), std::invalid_argument);
  CHECK_THROWS_AS(WeightedDataset(x, vec({1, -1}), vec({1.5, -0.5})), std::invalid_argument);
  CHECK_THROWS_AS(WeightedDataset(x, vec({1}), vec({1.0})), std::invalid_argument);
  CHECK_THROWS_AS(WeightedDataset(Matrix(0, 2), Vector(0), Vector(0)), std::invalid_argument);
  // Norm bound in the q-norm, and only when requested.
  const Matrix big = rows({{0.8, 0.8}});
  CHECK_THROWS_AS(WeightedDataset::uniform(big, vec({1}), 2.0), std::invalid_argument);
  CHECK_NOTHROW(WeightedDataset::uniform(big, vec({1}), std::numeric_limits<double>::infinity()));
  CHECK_NOTHROW(WeightedDataset::uniform(big, vec({1}), 2.0, false));
  // Weights summing to one within 1e-12 are accepted.
  CHECK_NOTHROW(WeightedDataset(x, vec({1, -1}), vec({0.5 + 4e-13, 0.5})));
}

TEST_CASE("lp norms and dual exponents") {
  const Vector v = vec({3, -4});
  CHECK(lp_norm(v, 2.0) == doctest::Approx(5.0));
  CHECK(lp_norm(v, 1.0) == 7.0);
  CHECK(lp_norm(v, std::numeric_limits<double>::infinity()) == 4.0);
  CHECK(lp_norm(v, 1.5) == doctest::Approx(std::pow(std::pow(3.0, 1.5) + std::pow(4.0, 1.5), 1 / 1.5)));
  CHECK(lp_norm(Vector::Zero(3), 1.5) == 0.0);
  CHECK(dual_exponent(2.0) == 2.0);
  CHECK(dual_exponent(1.5) == doctest::Approx(3.0));
  CHECK(std::isinf(dual_exponent(1.0)));
}

TEST_CASE("empirical risk examples") {
  const Matrix x = rows({{0.1, 0.2}, {-0.3, 0.4}, {0.5, -0.1}, {0.0, 0.0}});
  const WeightedDataset data = WeightedDataset::uniform(x, vec({1, -1, 1, -1}));
  const LossFunction h = LossFunction::piecewise_linear(1.0);
  const Predictor zero = [](const Vector&) { return 0.0; };
  CHECK(empirical_risk(zero, h, data) == 0.5);

  const WeightedDataset single = WeightedDataset::uniform(rows({{0.5}}), vec({1}));
  const Predictor big = [](const Vector& p) { return 4.0 * p[0]; };
  CHECK(empirical_risk(big, h, single) == 0.0);

  // Two points whose losses are 0 and 1.
  const WeightedDataset two = WeightedDataset::uniform(rows({{0.5}, {0.5}}), vec({1, -1}));
  CHECK(empirical_risk(big, h, two) == 0.5);

  // Uniform weights reproduce the unweighted mean.
  const Predictor f = [](const Vector& p) { return p[0] - 2.0 * p[1]; };
  double mean = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    mean += h(-data.labels()[static_cast<Eigen::Index>(i)] * f(data.point(i)));
  }
  CHECK(empirical_risk(f, h, data) == doctest::Approx(mean / 4.0).epsilon(1e-12));

  // Importance weights enter linearly.
  const WeightedDataset weighted = data.with_weights(vec({0.7, 0.1, 0.1, 0.1}));
  double expected = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    expected += weighted.weights()[k] * h(-data.labels()[k] * f(data.point(i)));
  }
  CHECK(empirical_risk(f, h, weighted) == doctest::Approx(expected).epsilon(1e-12));
  for (double value : {empirical_risk(f, h, weighted), empirical_risk(zero, h, weighted)}) {
    CHECK(value >= 0.0);
    CHECK(value <= 1.0);
  }
}

TEST_CASE("non-finite predictions are rejected") {
  const WeightedDataset data = WeightedDataset::uniform(rows({{0.5}}), vec({1}));
  const Predictor nan = [](const Vector&) { return std::numeric_limits<double>::quiet_NaN(); };
  const Predictor inf = [](const Vector&) { return std::numeric_limits<double>::infinity(); };
  CHECK_THROWS_AS(empirical_risk(nan, LossFunction::piecewise_linear(1.0), data), NumericError);
  CHECK_THROWS_AS(empirical_risk(inf, LossFunction::neg_min(), data), NumericError);
  CHECK_THROWS_AS(zero_one_risk(nan, data), NumericError);
  CHECK_THROWS_AS(margin_stats(inf, data), NumericError);
}

TEST_CASE("zero-one risk examples") {
  const WeightedDataset data =
      WeightedDataset::uniform(rows({{0.5}, {0.25}, {-0.5}, {-0.25}}), vec({1, 1, -1, -1}));
  const Predictor right = [](const Vector& p) { return p[0]; };
  const Predictor wrong = [](const Vector& p) { return -p[0]; };
  const Predictor one_off = [](const Vector& p) { return p[0] == 0.25 ? -1.0 : p[0]; };
  CHECK(zero_one_risk(right, data) == 0.0);
  CHECK(zero_one_risk(wrong, data) == 1.0);
  CHECK(zero_one_risk(one_off, data) == 0.25);
  // A zero score counts as an error.
  CHECK(zero_one_risk([](const Vector&) { return 0.0; }, data) == 1.0);
}

TEST_CASE("margin statistics examples") {
  const WeightedDataset data = WeightedDataset::uniform(rows({{0.2}, {-0.6}}), vec({1, -1}));
  const MarginStats zero = margin_stats([](const Vector&) { return 0.0; }, data);
  CHECK(zero.min_margin == 0.0);
  CHECK(zero.mean_margin == 0.0);
  const MarginStats m = margin_stats([](const Vector& p) { return p[0]; }, data);
  CHECK(m.min_margin == doctest::Approx(0.2));
  CHECK(m.mean_margin == doctest::Approx(0.4));
}

TEST_CASE("dataset helpers") {
  const WeightedDataset data =
      WeightedDataset::uniform(rows({{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.6}}), vec({1, -1, 1}));
  const WeightedDataset sub = data.subset({2, 0});
  CHECK(sub.size() == 2);
  CHECK(sub.point(0)[0] == 0.5);
  CHECK(sub.weights()[1] == 0.5);
  const WeightedDataset flipped = data.with_labels(vec({-1, 1, -1}));
  CHECK(flipped.labels()[0] == -1.0);
  CHECK(flipped.weights() == data.weights());
  CHECK_THROWS_AS(data.subset({3}), std::out_of_range);
}
