#include "ncerm/boostnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "ncerm/csv.hpp"
#include "ncerm/halfspace.hpp"
#include "ncerm/neuralnet.hpp"

namespace ncerm {

std::uint64_t BoostConfig::default_rounds(std::size_t n, double budget, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (!(budget > 0.0)) throw std::invalid_argument("budget must be positive");
  const double t = std::ceil(16.0 * budget * budget * std::log(static_cast<double>(n) + 1.0) /
                             (gamma * gamma));
  return static_cast<std::uint64_t>(std::max(1.0, t));
}

Vector boost_weights(const Vector& previous_scores, const WeightedDataset& data,
                     Activation activation, WeightRule rule) {
  const Vector& y = data.labels();
  if (previous_scores.size() != y.size()) {
    throw std::invalid_argument("boost_weights: score count does not match the dataset");
  }
  Vector exponent(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double f = previous_scores[i];
    if (!std::isfinite(f)) throw NumericError("boost_weights: non-finite score");
    exponent[i] = rule == WeightRule::exponential ? -y[i] * f : -y[i] * activate(activation, f);
  }
  const double top = exponent.maxCoeff();
  Vector alpha = (exponent.array() - top).exp().matrix();
  alpha /= alpha.sum();
  return alpha;
}

Vector boost_weights(const NeuralNetwork& previous, const NetworkClassSpec& spec,
                     const WeightedDataset& data, WeightRule rule) {
  return boost_weights(evaluate_all(previous, spec, data.features()), data, spec.activation, rule);
}

double weak_learner_epsilon(double gamma, int depth, double budget, double lipschitz) {
  return gamma / ((4.0 * depth + 10.0) * lipschitz * std::pow(budget, depth));
}

WeakHypothesis weak_learn(const WeightedDataset& data, const NetworkClassSpec& weak_spec,
                          const WeakLearnerBudget& budget, double epsilon, std::uint64_t seed) {
  if (weak_spec.depth < 1) throw std::invalid_argument("weak learner depth must be positive");
  if (budget.t_budget == 0) throw std::invalid_argument("weak learner round budget must be positive");
  const LossFunction edge = LossFunction::from_activation(weak_spec.activation);
  const double delta = 0.5;
  WeakHypothesis out;
  WeakLearnerKind kind = budget.kind;
  if (weak_spec.depth > 1) kind = WeakLearnerKind::algorithm3;

  if (kind == WeakLearnerKind::algorithm1) {
    if (weak_spec.leaf_p != 2.0) {
      throw std::invalid_argument("the sphere-sampling weak learner needs leaf_p = 2");
    }
    HalfspaceRunConfig config = config_alg1(data.size(), static_cast<int>(data.dim()),
                                            std::min(epsilon, 0.49), delta);
    config.r = weak_spec.budget;
    config.radius = weak_spec.budget;
    config.t_budget = budget.t_budget;
    config.seed = seed;
    HalfspaceOptions options;
    options.refine_budget = budget.refine_budget;
    HalfspaceResult fit = algorithm1(data, edge, config, options);
    out.network = NeuralNetwork::leaf(fit.model.w);
    out.edge = fit.loss;
  } else if (kind == WeakLearnerKind::algorithm2) {
    HalfspaceRunConfig config =
        config_alg2(data.size(), static_cast<int>(data.dim()), weak_spec.leaf_p, epsilon, delta);
    if (budget.k > 0) config.k = budget.k;
    config.radius = weak_spec.budget;
    config.t_budget = budget.t_budget;
    config.seed = seed;
    HalfspaceOptions options;
    options.refine_budget = budget.refine_budget;
    HalfspaceResult fit = algorithm2(data, edge, config, options);
    out.network = NeuralNetwork::leaf(fit.model.w);
    out.edge = fit.loss;
  } else {
    Algorithm3Options options;
    options.t_budget = budget.t_budget;
    options.refine_budget = budget.refine_budget;
    options.seed = seed;
    options.k_override = budget.k;
    options.s_override = budget.s;
    NetworkFitResult fit = algorithm3(data, edge, weak_spec, epsilon, delta, options);
    out.network = std::move(fit.network);
    out.edge = fit.loss;
  }
  return out;
}

BoostResult boostnet_train(const WeightedDataset& data, const NetworkClassSpec& spec,
                           const BoostConfig& config, std::uint64_t seed,
                           const BoostObserver& observer) {
  if (spec.depth < 2) throw std::invalid_argument("boosting needs depth >= 2");
  if (!(config.gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (data.empty()) throw std::invalid_argument("empty dataset");
  const std::size_t n = data.size();
  const std::uint64_t rounds =
      config.rounds > 0 ? config.rounds : BoostConfig::default_rounds(n, spec.budget, config.gamma);
  const NetworkClassSpec weak_spec = spec.with_depth(spec.depth - 1);
  const double epsilon = weak_learner_epsilon(config.gamma, spec.depth, spec.budget);
  const Vector& y = data.labels();

  BoostResult result;
  BoostState& state = result.state;
  state.scores = Vector::Zero(static_cast<Eigen::Index>(n));
  double mu_squares = 0.0;

  for (std::uint64_t t = 1; t <= rounds; ++t) {
    state.point_weights = boost_weights(state.scores, data, spec.activation, config.weight_rule);
    const WeightedDataset reweighted = data.with_weights(state.point_weights);
    WeakHypothesis weak = weak_learn(reweighted, weak_spec, config.weak, epsilon,
                                     derive_seed(seed, stream::kBoostRound, t));

    BoostRound round;
    round.t = t;
    round.raw_edge = weak.edge;
    round.clamped = weak.edge < -0.5;
    round.mu = std::max(-0.5, weak.edge);
    if (!(round.mu < 1.0)) throw NumericError("boosting edge reached 1");
    round.coefficient = 0.5 * std::log((1.0 - round.mu) / (1.0 + round.mu));
    result.any_clamped = result.any_clamped || round.clamped;
    mu_squares += round.mu * round.mu;

    const Vector inner = evaluate_all(weak.network, weak_spec, data.features());
    for (Eigen::Index i = 0; i < inner.size(); ++i) {
      state.scores[i] += round.coefficient * activate(spec.activation, inner[i]);
    }
    state.b += std::abs(round.coefficient);
    state.coefficients.push_back(round.coefficient);
    state.learners.push_back(std::move(weak.network));
    state.mu_history.push_back(round.mu);

    round.train_zero_one = zero_one_risk(state.scores, data);
    if (state.b > 0.0) {
      round.min_margin = margin_stats(state.scores * (spec.budget / state.b), data).min_margin;
    }
    result.rounds.push_back(round);
    if (observer) observer(round, state.learners.back(), state);
  }
  if (!(state.b > 0.0)) throw std::runtime_error("no progress");

  Vector c(static_cast<Eigen::Index>(state.coefficients.size()));
  for (std::size_t t = 0; t < state.coefficients.size(); ++t) {
    c[static_cast<Eigen::Index>(t)] = state.coefficients[t] * spec.budget / state.b;
  }
  result.network = NeuralNetwork::node(state.learners, std::move(c));

  double potential = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) potential += std::exp(-y[i] * state.scores[i]);
  result.potential = potential / static_cast<double>(n);
  result.potential_bound = std::exp(-0.5 * mu_squares);
  return result;
}

MarginCertificate margin_certificate(const NeuralNetwork& net, const NetworkClassSpec& spec,
                                     const WeightedDataset& data, double gamma) {
  const Vector scores = evaluate_all(net, spec, data.features());
  MarginCertificate cert;
  cert.threshold = gamma / 16.0;
  cert.min_margin = std::numeric_limits<double>::infinity();
  std::size_t above = 0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const double margin = data.labels()[i] * scores[i];
    cert.min_margin = std::min(cert.min_margin, margin);
    if (margin >= cert.threshold) ++above;
  }
  cert.fraction = static_cast<double>(above) / static_cast<double>(data.size());
  return cert;
}

void write_rounds_csv(std::ostream& out, const std::vector<BoostRound>& rounds) {
  csv::Writer writer(out);
  writer.header({"t", "mu_t", "coefficient", "train_zero_one", "min_margin"});
  for (const auto& r : rounds) {
    writer.row({std::to_string(r.t), csv::format(r.mu), csv::format(r.coefficient),
                csv::format(r.train_zero_one), csv::format(r.min_margin)});
  }
}

std::string to_string(WeakLearnerKind kind) {
  switch (kind) {
    case WeakLearnerKind::algorithm1: return "sphere";
    case WeakLearnerKind::algorithm2: return "least_squares";
    case WeakLearnerKind::algorithm3: return "network";
  }
  return "unknown";
}

WeakLearnerKind parse_weak_learner(std::string_view name) {
  if (name == "sphere") return WeakLearnerKind::algorithm1;
  if (name == "least_squares") return WeakLearnerKind::algorithm2;
  if (name == "network") return WeakLearnerKind::algorithm3;
  throw std::invalid_argument("unknown weak learner: " + std::string(name));
}

std::string to_string(WeightRule rule) {
  return rule == WeightRule::exponential ? "exponential" : "activated";
}

WeightRule parse_weight_rule(std::string_view name) {
  if (name == "exponential") return WeightRule::exponential;
  if (name == "activated") return WeightRule::activated;
  throw std::invalid_argument("unknown weight rule: " + std::string(name));
}

}  // namespace ncerm
