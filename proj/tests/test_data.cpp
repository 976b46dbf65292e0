#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "ncerm/data.hpp"

using namespace ncerm;
using testing::rows;
using testing::vec;

TEST_CASE("importance sampling follows the weights") {
  const Matrix x = rows({{0.1}, {0.2}, {0.3}, {0.4}});
  const Vector y = vec({1, -1, 1, -1});

  SUBCASE("all mass on one point") {
    const WeightedDataset data(x, y, vec({0, 0, 1, 0}));
    const SampleBatch b = importance_sample(data, 7, 5);
    CHECK(b.size() == 7);
    for (std::size_t j = 0; j < b.size(); ++j) {
      CHECK(b.indices[j] == 2);
      CHECK(b.features(static_cast<Eigen::Index>(j), 0) == 0.3);
      CHECK(b.labels[static_cast<Eigen::Index>(j)] == 1.0);
    }
  }
  SUBCASE("a zero-weight point never appears") {
    const WeightedDataset data(x, y, vec({0.5, 0.0, 0.25, 0.25}));
    const SampleBatch b = importance_sample(data, 100000, 9);
    for (std::size_t i : b.indices) CHECK_NE(i, 1);
  }
  SUBCASE("uniform frequencies") {
    const WeightedDataset data = WeightedDataset::uniform(x, y);
    const SampleBatch b = importance_sample(data, 100000, 13);
    std::vector<int> counts(4, 0);
    for (std::size_t i : b.indices) ++counts[i];
    for (int c : counts) CHECK(std::abs(c / 100000.0 - 0.25) <= 0.01);
  }
  SUBCASE("non-uniform frequencies") {
    const WeightedDataset data(x, y, vec({0.1, 0.2, 0.3, 0.4}));
    const SampleBatch b = importance_sample(data, 100000, 17);
    std::vector<int> counts(4, 0);
    for (std::size_t i : b.indices) ++counts[i];
    for (int i = 0; i < 4; ++i) CHECK(std::abs(counts[i] / 100000.0 - 0.1 * (i + 1)) <= 0.01);
  }
  SUBCASE("deterministic and rejects k = 0") {
    const WeightedDataset data = WeightedDataset::uniform(x, y);
    CHECK(importance_sample(data, 20, 3).indices == importance_sample(data, 20, 3).indices);
    CHECK(importance_sample(data, 20, 3).indices != importance_sample(data, 20, 4).indices);
    CHECK_THROWS_AS(importance_sample(data, 0, 3), std::invalid_argument);
  }
}

TEST_CASE("parity data") {
  SUBCASE("noise-free labels are the hidden parity") {
    const ParityDataset pd = parity_dataset(8, 3, 500, 0.0, 21);
    CHECK(pd.hidden.size() == 3);
    CHECK(std::is_sorted(pd.hidden.begin(), pd.hidden.end()));
    const double scale = std::sqrt(9.0);
    for (std::size_t i = 0; i < pd.data.size(); ++i) {
      const Vector x = pd.data.point(i) * scale;
      CHECK(x[8] == doctest::Approx(1.0));
      double parity = 1.0;
      for (int j : pd.hidden) parity *= std::round(x[j]);
      CHECK(pd.data.labels()[static_cast<Eigen::Index>(i)] == parity);
      CHECK(pd.data.point(i).norm() == doctest::Approx(1.0));
      CHECK_FALSE(pd.flipped[i]);
    }
  }
  SUBCASE("noise rate") {
    const ParityDataset pd = parity_dataset(50, 5, 50000, 0.1, 2);
    CHECK(pd.data.size() == 50000);
    CHECK(pd.data.dim() == 51);
    const auto flips = std::count(pd.flipped.begin(), pd.flipped.end(), true);
    CHECK(std::abs(flips / 50000.0 - 0.1) <= 0.01);
  }
  SUBCASE("invalid parameters") {
    CHECK_THROWS_AS(parity_dataset(5, 0, 10, 0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(parity_dataset(5, 6, 10, 0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(parity_dataset(5, 2, 10, 0.5, 1), std::invalid_argument);
  }
}

TEST_CASE("planted halfspace") {
  for (double p : {2.0, 1.5, 1.0}) {
    const PlantedHalfspace ph = planted_halfspace(5, 200, p == 1.0 ? 0.05 : 0.3, p, 8);
    const double margin = p == 1.0 ? 0.05 : 0.3;
    CHECK(lp_norm(ph.separator.w, p) == doctest::Approx(1.0).epsilon(1e-9));
    const Vector scores = ph.separator.scores(ph.data.features());
    CHECK(zero_one_risk(scores, ph.data) == 0.0);
    CHECK(margin_stats(scores, ph.data).min_margin >= margin);
    for (std::size_t i = 0; i < ph.data.size(); ++i) {
      CHECK(lp_norm(ph.data.point(i), dual_exponent(p)) <= 1.0 + 1e-9);
    }
  }
  CHECK_THROWS_AS(planted_halfspace(5, 10, 0.0, 2.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(planted_halfspace(5, 10, 1.5, 2.0, 1), std::runtime_error);
  const auto a = planted_halfspace(4, 30, 0.2, 2.0, 77);
  const auto b = planted_halfspace(4, 30, 0.2, 2.0, 77);
  CHECK(a.data.features() == b.data.features());
  CHECK(a.separator.w == b.separator.w);
}

TEST_CASE("planted network") {
  NetworkClassSpec spec;
  spec.depth = 2;
  spec.budget = 2.0;
  const PlantedNetwork pn = planted_network(spec, 5, 200, 0.3, 4);
  CHECK(validate(pn.separator, spec).ok);
  const Vector scores = evaluate_all(pn.separator, spec, pn.data.features());
  CHECK(margin_stats(scores, pn.data).min_margin >= 0.3);
}

TEST_CASE("label flipping") {
  const ParityDataset pd = parity_dataset(4, 2, 100000, 0.0, 5);
  CHECK(flip_labels(pd.data, 0.0, 1).labels() == pd.data.labels());
  const WeightedDataset flipped = flip_labels(pd.data, 0.25, 1);
  const double fraction = (flipped.labels() - pd.data.labels()).cwiseAbs().sum() / 2.0 / 100000.0;
  CHECK(std::abs(fraction - 0.25) <= 0.01);
  CHECK(flipped.weights() == pd.data.weights());
  CHECK_THROWS_AS(flip_labels(pd.data, 0.5, 1), std::invalid_argument);
}

TEST_CASE("dataset CSV round trip") {
  const Matrix x = rows({{0.1, -0.2}, {1.0 / 3.0, 0.25}});
  const WeightedDataset data(x, vec({1, -1}), vec({0.3, 0.7}));
  std::stringstream ss;
  write_dataset_csv(ss, data);
  CHECK(ss.str().rfind("x_1,x_2,y,weight\n", 0) == 0);
  const WeightedDataset back = read_dataset_csv(ss);
  CHECK(back.features() == data.features());
  CHECK(back.labels() == data.labels());
  CHECK(back.weights() == data.weights());

  std::stringstream bad_header("a,b,y,weight\n0.1,0.1,1,1\n");
  CHECK_THROWS_AS(read_dataset_csv(bad_header), std::invalid_argument);
  std::stringstream bad_row("x_1,y,weight\n0.1,1\n");
  CHECK_THROWS_AS(read_dataset_csv(bad_row), std::invalid_argument);
  std::stringstream bad_number("x_1,y,weight\nabc,1,1\n");
  CHECK_THROWS_AS(read_dataset_csv(bad_number), std::invalid_argument);
}
