#include "ncerm/analysis.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "ncerm/data.hpp"
#include "ncerm/random.hpp"

namespace ncerm {

namespace {

struct RunningMean {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++count;
  }
  double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
  double std_error() const {
    if (count < 2) return 0.0;
    const double m = mean();
    const double var = std::max(0.0, (sum_sq - static_cast<double>(count) * m * m) /
                                         static_cast<double>(count - 1));
    return std::sqrt(var / static_cast<double>(count));
  }
};

Vector rademacher_signs(Rng& rng, Eigen::Index k) {
  std::bernoulli_distribution coin(0.5);
  Vector eps(k);
  for (Eigen::Index j = 0; j < k; ++j) eps[j] = coin(rng) ? 1.0 : -1.0;
  return eps;
}

double sup_correlation(const Matrix& values, const Vector& eps) {
  const Vector corr = values * eps / static_cast<double>(eps.size());
  return std::max(0.0, corr.size() ? corr.maxCoeff() : 0.0);
}

Matrix evaluate_candidates(const std::vector<Predictor>& candidates, const Matrix& batch) {
  Matrix values(static_cast<Eigen::Index>(candidates.size()), batch.rows());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    values.row(static_cast<Eigen::Index>(c)) = predict_all(candidates[c], batch).transpose();
  }
  return values;
}

}  // namespace

RademacherEstimate rademacher_estimate(const Matrix& values, std::size_t trials, std::uint64_t seed) {
  if (values.rows() == 0) throw std::invalid_argument("rademacher_estimate: empty candidate set");
  if (values.cols() == 0) throw std::invalid_argument("rademacher_estimate: empty batch");
  if (trials == 0) throw std::invalid_argument("rademacher_estimate: trials must be positive");
  RunningMean acc;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, stream::kAnalysis, t));
    acc.add(sup_correlation(values, rademacher_signs(rng, values.cols())));
  }
  RademacherEstimate est;
  est.value = acc.mean();
  est.std_error = acc.std_error();
  est.trials = trials;
  est.k = static_cast<std::size_t>(values.cols());
  return est;
}

RademacherEstimate rademacher_estimate(const std::vector<Predictor>& candidates, const Matrix& batch,
                                       std::size_t trials, std::uint64_t seed) {
  if (candidates.empty()) throw std::invalid_argument("rademacher_estimate: empty candidate set");
  return rademacher_estimate(evaluate_candidates(candidates, batch), trials, seed);
}

GeneralizationGap generalization_gap_check(const std::vector<Predictor>& candidates,
                                           const LossFunction& loss, const WeightedDataset& data,
                                           std::size_t k, std::size_t trials, std::uint64_t seed) {
  if (k == 0 || trials == 0) throw std::invalid_argument("k and trials must be positive");
  const Matrix all_values = evaluate_candidates(candidates, data.features());
  const auto m = all_values.rows();
  // Weighted loss of each candidate, then the zero function last.
  Vector population(m + 1);
  for (Eigen::Index c = 0; c < m; ++c) {
    population[c] = empirical_risk(all_values.row(c).transpose(), loss, data);
  }
  population[m] = loss(0.0);

  const ImportanceSampler sampler(data);
  RunningMean gaps;
  RunningMean complexity;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, stream::kAnalysis, t));
    std::vector<std::size_t> picks(k);
    for (auto& i : picks) i = sampler.draw_index(rng);
    Matrix values(m, static_cast<Eigen::Index>(k));
    Vector labels(static_cast<Eigen::Index>(k));
    for (std::size_t j = 0; j < k; ++j) {
      const auto col = static_cast<Eigen::Index>(j);
      values.col(col) = all_values.col(static_cast<Eigen::Index>(picks[j]));
      labels[col] = data.labels()[static_cast<Eigen::Index>(picks[j])];
    }
    double worst = std::abs(loss(0.0) - population[m]);
    for (Eigen::Index c = 0; c < m; ++c) {
      double sample = 0.0;
      for (Eigen::Index j = 0; j < labels.size(); ++j) sample += loss(-labels[j] * values(c, j));
      sample /= static_cast<double>(k);
      worst = std::max(worst, std::abs(sample - population[c]));
    }
    gaps.add(worst);
    complexity.add(m ? sup_correlation(values, rademacher_signs(rng, values.cols())) : 0.0);
  }
  GeneralizationGap out;
  out.mean_gap = gaps.mean();
  out.gap_std_error = gaps.std_error();
  out.complexity.value = complexity.mean();
  out.complexity.std_error = complexity.std_error();
  out.complexity.trials = trials;
  out.complexity.k = k;
  out.bound = 4.0 * loss.lipschitz() * (out.complexity.value + 3.0 * out.complexity.std_error);
  return out;
}

JlCheck jl_distortion_check(const Matrix& points, double epsilon, std::size_t trials,
                            std::uint64_t seed) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw std::invalid_argument("epsilon must lie in (0, 1/2)");
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  const auto n = points.rows();
  const auto d = points.cols();
  if (n == 0 || d == 0) throw std::invalid_argument("jl_distortion_check: empty point set");
  JlCheck out;
  out.trials = trials;
  const double jl = std::ceil(12.0 * std::log(static_cast<double>(n)) / (epsilon * epsilon));
  out.s = static_cast<int>(std::clamp<double>(jl, 1.0, static_cast<double>(d)));

  // Pairwise differences as columns.
  const Eigen::Index pairs = n * (n - 1) / 2;
  Matrix diffs(d, pairs);
  Vector sq(pairs);
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j, ++col) {
      diffs.col(col) = (points.row(i) - points.row(j)).transpose();
      sq[col] = diffs.col(col).squaredNorm();
    }
  }
  const double scale = static_cast<double>(d) / out.s;
  // A uniformly random subspace has a uniformly random orthogonal
  // complement, so the smaller of the two is sampled.
  const bool use_complement = 2 * out.s > d;
  const Eigen::Index sampled = use_complement ? d - out.s : out.s;

  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, stream::kAnalysis, t));
    Vector kept = sq;  // squared norm of each difference inside the subspace
    if (sampled > 0) {
      Matrix g(d, sampled);
      std::normal_distribution<double> normal(0.0, 1.0);
      for (Eigen::Index c = 0; c < sampled; ++c) {
        for (Eigen::Index r = 0; r < d; ++r) g(r, c) = normal(rng);
      }
      const Eigen::HouseholderQR<Matrix> qr(g);
      const Matrix q = qr.householderQ() * Matrix::Identity(d, sampled);
      const Vector inside = (q.transpose() * diffs).colwise().squaredNorm().transpose();
      kept = use_complement ? Vector(sq - inside) : inside;
    } else if (!use_complement) {
      kept.setZero();
    }
    bool ok = true;
    for (Eigen::Index p = 0; p < pairs; ++p) {
      if (sq[p] == 0.0) continue;
      const double distortion = std::abs(scale * kept[p] - sq[p]) / sq[p];
      out.worst_distortion = std::max(out.worst_distortion, distortion);
      if (distortion > epsilon) ok = false;
    }
    if (ok) ++out.successes;
  }
  out.frequency = static_cast<double>(out.successes) / static_cast<double>(trials);
  out.std_error = std::sqrt(out.frequency * (1.0 - out.frequency) / static_cast<double>(trials));
  return out;
}

MaureyCheck maurey_sparsify(const Matrix& atoms, const Vector& weights, double b, int s,
                            std::size_t trials, std::uint64_t seed) {
  if (atoms.rows() == 0) throw std::invalid_argument("maurey_sparsify: no atoms");
  if (weights.size() != atoms.rows()) throw std::invalid_argument("one weight per atom required");
  if (s < 1 || trials == 0) throw std::invalid_argument("s and trials must be positive");
  if ((weights.array() < 0.0).any() || std::abs(weights.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("weights must be a convex combination");
  }
  for (Eigen::Index i = 0; i < atoms.rows(); ++i) {
    if (atoms.row(i).norm() > b + 1e-9) throw std::invalid_argument("atom norm exceeds b");
  }
  const Vector target = atoms.transpose() * weights;
  std::vector<double> w(weights.data(), weights.data() + weights.size());
  RunningMean acc;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, stream::kAnalysis, t));
    std::discrete_distribution<Eigen::Index> pick(w.begin(), w.end());
    Vector avg = Vector::Zero(atoms.cols());
    for (int j = 0; j < s; ++j) avg += atoms.row(pick(rng)).transpose();
    avg /= static_cast<double>(s);
    acc.add((target - avg).squaredNorm());
  }
  MaureyCheck out;
  out.mean_squared_error = acc.mean();
  out.std_error = acc.std_error();
  out.bound = b * b / s;
  return out;
}

}  // namespace ncerm
