#include "ncerm/halfspace.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace ncerm {

RoundCount RoundCount::from_power(double coefficient, double base, double exponent,
                                  double log_factor) {
  RoundCount count;
  count.log_value = std::log(coefficient) + exponent * std::log(base) + std::log(log_factor);
  const long double direct = static_cast<long double>(coefficient) *
                             std::pow(static_cast<long double>(base), exponent) * log_factor;
  if (std::isfinite(static_cast<double>(direct))) {
    count.value = std::max(1.0, static_cast<double>(std::ceil(direct)));
  } else {
    count.value = std::numeric_limits<double>::infinity();
  }
  return count;
}

std::uint64_t RoundCount::capped(std::uint64_t cap) const {
  if (value >= static_cast<double>(cap)) return cap;
  return static_cast<std::uint64_t>(value);
}

namespace {

void check_epsilon_delta(double epsilon, double delta) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
}

double max_row_norm(const Matrix& x, double q) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    worst = std::max(worst, lp_norm(x.row(i).transpose(), q));
  }
  return worst;
}

void check_points(const WeightedDataset& data, double q) {
  if (data.empty()) throw std::invalid_argument("empty dataset");
  if (max_row_norm(data.features(), q) > 1.0 + 1e-9) {
    throw std::invalid_argument("points must lie in the unit dual-norm ball");
  }
}

}  // namespace

HalfspaceRunConfig config_alg1(std::size_t n, int d, double epsilon, double delta) {
  check_epsilon_delta(epsilon, delta);
  if (!(epsilon < 0.5)) throw std::invalid_argument("epsilon must lie in (0, 1/2)");
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  HalfspaceRunConfig config;
  config.epsilon = epsilon;
  config.delta = delta;
  const double jl = std::ceil(12.0 * std::log(static_cast<double>(n) + 2.0) / (epsilon * epsilon));
  config.s = static_cast<int>(std::min<double>(d, jl));
  config.r = std::sqrt(static_cast<double>(d) / config.s);
  config.p = 2.0;
  config.radius = config.r;
  config.t_theory = RoundCount::from_power(2.0 * static_cast<double>(n) + 4.0,
                                           std::numbers::pi / epsilon, config.s - 1.0,
                                           -std::log(delta));
  config.t_budget = config.t_theory.capped(std::numeric_limits<std::uint64_t>::max());
  return config;
}

HalfspaceRunConfig config_alg2(std::size_t /*n*/, int d, double p, double epsilon, double delta) {
  check_epsilon_delta(epsilon, delta);
  if (!(p >= 1.0 && p <= 2.0)) throw std::invalid_argument("p must lie in [1, 2]");
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  HalfspaceRunConfig config;
  config.epsilon = epsilon;
  config.delta = delta;
  config.p = p;
  config.radius = 1.0;
  const double eps2 = epsilon * epsilon;
  if (p == 1.0) {
    config.k = static_cast<int>(std::max(1.0, std::ceil(2.0 * std::log(static_cast<double>(d)) / eps2)));
  } else {
    const double q = dual_exponent(p);
    config.k = static_cast<int>(std::ceil((q - 1.0) / eps2));
  }
  config.t_theory = RoundCount::from_power(5.0, 4.0 / epsilon, config.k, -std::log(delta));
  config.t_budget = config.t_theory.capped(std::numeric_limits<std::uint64_t>::max());
  return config;
}

namespace {

template <class MakeCandidate>
HalfspaceResult best_of_rounds(const WeightedDataset& data, const LossFunction& loss,
                               const HalfspaceRunConfig& config, const HalfspaceOptions& options,
                               std::uint64_t stream_tag, MakeCandidate make_candidate) {
  HalfspaceResult result;
  result.rounds = config.rounds();
  result.loss = std::numeric_limits<double>::infinity();
  for (std::uint64_t t = 0; t < result.rounds; ++t) {
    Rng rng(derive_seed(config.seed, stream_tag, t));
    LinearModel candidate = make_candidate(rng);
    if (options.refine_budget > 0) {
      candidate = refine(candidate, data, loss, options.refine_budget);
    }
    const double value = empirical_risk(candidate.scores(data.features()), loss, data);
    if (options.on_round) options.on_round(t, candidate, value);
    if (value < result.loss) {
      result.loss = value;
      result.model = std::move(candidate);
      result.best_round = t;
    }
  }
  return result;
}

}  // namespace

HalfspaceResult algorithm1(const WeightedDataset& data, const LossFunction& loss,
                           const HalfspaceRunConfig& config, const HalfspaceOptions& options) {
  check_points(data, 2.0);
  if (config.rounds() == 0) throw std::invalid_argument("round budget must be positive");
  const auto d = data.dim();
  return best_of_rounds(data, loss, config, options, stream::kAlgorithm1, [&](Rng& rng) {
    return LinearModel{config.r * unit_sphere(rng, d), 2.0, config.r};
  });
}

HalfspaceResult algorithm2(const WeightedDataset& data, const LossFunction& loss,
                           const HalfspaceRunConfig& config, const HalfspaceOptions& options) {
  check_points(data, dual_exponent(config.p));
  if (config.rounds() == 0) throw std::invalid_argument("round budget must be positive");
  if (config.k < 1) throw std::invalid_argument("resample size k must be positive");
  const ImportanceSampler sampler(data);
  return best_of_rounds(data, loss, config, options, stream::kResampledRounds, [&](Rng& rng) {
    const SampleBatch batch = sampler.draw(static_cast<std::size_t>(config.k), rng);
    const Vector u = options.target_override ? options.target_override(batch, rng)
                                             : uniform_cube(rng, config.k, config.radius);
    Vector w = constrained_least_squares(batch.features, u, config.p, config.radius);
    return LinearModel{std::move(w), config.p, config.radius};
  });
}

}  // namespace ncerm
