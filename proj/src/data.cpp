#include "ncerm/data.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "ncerm/csv.hpp"

namespace ncerm {

ImportanceSampler::ImportanceSampler(const WeightedDataset& data) : data_(&data) {
  if (data.empty()) throw std::invalid_argument("cannot sample from an empty dataset");
  cumulative_.resize(data.size());
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    total += data.weights()[static_cast<Eigen::Index>(i)];
    cumulative_[i] = total;
  }
}

std::size_t ImportanceSampler::draw_index(Rng& rng) const {
  std::uniform_real_distribution<double> dist(0.0, cumulative_.back());
  const double u = dist(rng);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) {
    // u landed on the total (rounding); take the last positive-weight point.
    it = std::lower_bound(cumulative_.begin(), cumulative_.end(), cumulative_.back());
  }
  return static_cast<std::size_t>(it - cumulative_.begin());
}

SampleBatch ImportanceSampler::draw(std::size_t k, Rng& rng) const {
  if (k == 0) throw std::invalid_argument("importance sample size must be positive");
  SampleBatch batch;
  batch.features.resize(static_cast<Eigen::Index>(k), data_->dim());
  batch.labels.resize(static_cast<Eigen::Index>(k));
  batch.indices.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t i = draw_index(rng);
    batch.indices[j] = i;
    batch.features.row(static_cast<Eigen::Index>(j)) =
        data_->features().row(static_cast<Eigen::Index>(i));
    batch.labels[static_cast<Eigen::Index>(j)] = data_->labels()[static_cast<Eigen::Index>(i)];
  }
  return batch;
}

SampleBatch importance_sample(const WeightedDataset& data, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw std::invalid_argument("importance sample size must be positive");
  Rng rng(seed);
  return ImportanceSampler(data).draw(k, rng);
}

ParityDataset parity_dataset(int d, int p, std::size_t n, double noise_rate, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("parity: d must be positive");
  if (p < 1 || p > d) throw std::invalid_argument("parity: need 1 <= p <= d");
  if (!(noise_rate >= 0.0 && noise_rate < 0.5)) {
    throw std::invalid_argument("parity: noise rate must lie in [0, 1/2)");
  }
  if (n == 0) throw std::invalid_argument("parity: n must be positive");

  Rng subset_rng(derive_seed(seed, stream::kData, 0));
  std::vector<int> coords(static_cast<std::size_t>(d));
  std::iota(coords.begin(), coords.end(), 0);
  std::shuffle(coords.begin(), coords.end(), subset_rng);
  std::vector<int> hidden(coords.begin(), coords.begin() + p);
  std::sort(hidden.begin(), hidden.end());

  Rng point_rng(derive_seed(seed, stream::kData, 1));
  Rng noise_rng(derive_seed(seed, stream::kLabels, 0));
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution flip(noise_rate);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d + 1));

  Matrix x(static_cast<Eigen::Index>(n), d + 1);
  Vector y(static_cast<Eigen::Index>(n));
  std::vector<bool> flipped(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    for (int j = 0; j < d; ++j) x(row, j) = coin(point_rng) ? 1.0 : -1.0;
    x(row, d) = 1.0;
    double parity = 1.0;
    for (int j : hidden) parity *= x(row, j);
    flipped[i] = flip(noise_rng);
    y[row] = flipped[i] ? -parity : parity;
  }
  x *= scale;
  return {WeightedDataset::uniform(std::move(x), std::move(y), 2.0, true), std::move(hidden),
          std::move(flipped)};
}

namespace {

// A point in the unit l_q ball: Gaussian direction normalized in l_q, radius
// U^(1/d).
Vector ball_point(Rng& rng, Eigen::Index d, double q) {
  Vector g;
  double norm = 0.0;
  do {
    g = gaussian_vector(rng, d);
    norm = lp_norm(g, q);
  } while (norm == 0.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double radius = std::pow(unif(rng), 1.0 / static_cast<double>(d));
  return g * (radius / norm);
}

template <class Score>
WeightedDataset rejection_sample(Eigen::Index d, std::size_t n, double margin, double q, Rng& rng,
                                 Score score) {
  if (!(margin > 0.0)) throw std::invalid_argument("planted margin must be positive");
  if (n == 0) throw std::invalid_argument("planted dataset needs n >= 1");
  Matrix x(static_cast<Eigen::Index>(n), d);
  Vector y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    bool accepted = false;
    for (int attempt = 0; attempt < kMaxRejectionAttempts; ++attempt) {
      const Vector candidate = ball_point(rng, d, q);
      const double s = score(candidate);
      if (std::abs(s) >= margin) {
        x.row(static_cast<Eigen::Index>(i)) = candidate.transpose();
        y[static_cast<Eigen::Index>(i)] = s > 0.0 ? 1.0 : -1.0;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw std::runtime_error("planted instance: margin infeasible after rejection sampling");
    }
  }
  return WeightedDataset::uniform(std::move(x), std::move(y), q, true);
}

}  // namespace

PlantedHalfspace planted_halfspace(int d, std::size_t n, double margin, double p_exponent,
                                   std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("planted halfspace: d must be positive");
  if (!(p_exponent >= 1.0 && p_exponent <= 2.0)) {
    throw std::invalid_argument("planted halfspace: p must lie in [1, 2]");
  }
  Rng rng(derive_seed(seed, stream::kData, 0));
  Vector w = gaussian_vector(rng, d);
  w /= lp_norm(w, p_exponent);
  LinearModel separator{w, p_exponent, 1.0};
  const double q = dual_exponent(p_exponent);
  auto data = rejection_sample(d, n, margin, q, rng,
                               [&](const Vector& x) { return separator.w.dot(x); });
  return {std::move(data), std::move(separator)};
}

PlantedNetwork planted_network(const NetworkClassSpec& spec, int d, std::size_t n, double margin,
                               std::uint64_t seed, int width) {
  if (d < 1) throw std::invalid_argument("planted network: d must be positive");
  Rng rng(derive_seed(seed, stream::kData, 0));
  NeuralNetwork separator = random_network(spec, d, width, rng);
  auto data = rejection_sample(d, n, margin, spec.input_q(), rng,
                               [&](const Vector& x) { return evaluate(separator, spec, x); });
  return {std::move(data), std::move(separator)};
}

WeightedDataset flip_labels(const WeightedDataset& data, double eta, std::uint64_t seed) {
  if (!(eta >= 0.0 && eta < 0.5)) throw std::invalid_argument("flip rate must lie in [0, 1/2)");
  Rng rng(derive_seed(seed, stream::kLabels, 1));
  std::bernoulli_distribution flip(eta);
  Vector y = data.labels();
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (flip(rng)) y[i] = -y[i];
  }
  return data.with_labels(std::move(y));
}

void write_dataset_csv(std::ostream& out, const WeightedDataset& data) {
  for (Eigen::Index j = 0; j < data.dim(); ++j) out << "x_" << (j + 1) << ',';
  out << "y,weight\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < data.dim(); ++j) out << csv::format(data.features()(row, j)) << ',';
    out << (data.labels()[row] > 0 ? "1" : "-1") << ',' << csv::format(data.weights()[row])
        << '\n';
  }
}

WeightedDataset read_dataset_csv(std::istream& in, double q, bool norm_bounded) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("dataset CSV: missing header");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) header.push_back(field);
  }
  if (header.size() < 3 || header[header.size() - 2] != "y" || header.back() != "weight") {
    throw std::invalid_argument("dataset CSV: header must be x_1..x_d,y,weight");
  }
  const std::size_t d = header.size() - 2;
  for (std::size_t j = 0; j < d; ++j) {
    if (header[j] != "x_" + std::to_string(j + 1)) {
      throw std::invalid_argument("dataset CSV: unexpected column " + header[j]);
    }
  }
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(field, &used));
      } catch (const std::exception&) {
        throw std::invalid_argument("dataset CSV: bad number on line " + std::to_string(line_no));
      }
    }
    if (values.size() != d + 2) {
      throw std::invalid_argument("dataset CSV: wrong field count on line " +
                                  std::to_string(line_no));
    }
    rows.push_back(std::move(values));
  }
  Matrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  Vector y(static_cast<Eigen::Index>(rows.size()));
  Vector w(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < d; ++j) x(r, static_cast<Eigen::Index>(j)) = rows[i][j];
    y[r] = rows[i][d];
    w[r] = rows[i][d + 1];
  }
  return WeightedDataset(std::move(x), std::move(y), std::move(w), q, norm_bounded);
}

}  // namespace ncerm
