#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "ncerm/data.hpp"
#include "ncerm/network.hpp"

namespace ncerm {

enum class WeakLearnerKind { algorithm1, algorithm2, algorithm3 };

/// How the per-point boosting weights are computed from the running
/// combination f_{t-1}.
enum class WeightRule {
  exponential,  // alpha_i proportional to exp(-y_i f(x_i)), the AdaBoost weights
  activated,    // alpha_i proportional to exp(-y_i sigma(f(x_i)))
};

struct WeakLearnerBudget {
  WeakLearnerKind kind = WeakLearnerKind::algorithm2;
  std::uint64_t t_budget = 8;  // random restarts per boosting round
  int refine_budget = 30;
  int k = 10;  // resample size
  int s = 2;   // hidden width when the weak learner is itself multi-layer
};

struct BoostConfig {
  double gamma = 0.1;
  double delta = 0.1;
  std::uint64_t rounds = 0;  // 0 selects default_rounds
  WeakLearnerBudget weak;
  WeightRule weight_rule = WeightRule::exponential;

  /// ceil(16 B^2 ln(n+1) / gamma^2).
  static std::uint64_t default_rounds(std::size_t n, double budget, double gamma);
};

/// Normalized boosting weights from the scores f_{t-1}(x_i). The exponent is
/// shifted by its maximum before exponentiation.
Vector boost_weights(const Vector& previous_scores, const WeightedDataset& data,
                     Activation activation, WeightRule rule = WeightRule::exponential);
Vector boost_weights(const NeuralNetwork& previous, const NetworkClassSpec& spec,
                     const WeightedDataset& data, WeightRule rule = WeightRule::exponential);

/// Additive error handed to the weak learner: gamma / ((4m + 10) L B^m).
double weak_learner_epsilon(double gamma, int depth, double budget, double lipschitz = 1.0);

struct WeakHypothesis {
  NeuralNetwork network;
  double edge = 0.0;  // G(g) = sum_i alpha_i sigma(-y_i g(x_i))
};

/// Minimizes G over the depth-(m-1) class with the configured learner.
/// `data` carries the boosting weights; `weak_spec` has the weak depth.
WeakHypothesis weak_learn(const WeightedDataset& data, const NetworkClassSpec& weak_spec,
                          const WeakLearnerBudget& budget, double epsilon, std::uint64_t seed);

struct BoostRound {
  std::uint64_t t = 0;  // one-based
  double raw_edge = 0.0;
  double mu = 0.0;  // max{-1/2, raw_edge}
  double coefficient = 0.0;
  bool clamped = false;
  double train_zero_one = 0.0;
  double min_margin = 0.0;  // of the rescaled combination (B / b_t) f_t
};

struct BoostState {
  std::vector<double> coefficients;
  std::vector<NeuralNetwork> learners;
  double b = 0.0;
  std::vector<double> mu_history;
  Vector point_weights;
  Vector scores;  // f_t on the training points, unscaled
};

struct BoostResult {
  NeuralNetwork network;  // (B / b_T) f_T
  BoostState state;
  std::vector<BoostRound> rounds;
  bool any_clamped = false;
  double potential = 0.0;        // (1/n) sum_i exp(-y_i f_T(x_i))
  double potential_bound = 0.0;  // exp(-sum_t mu_t^2 / 2)
};

using BoostObserver =
    std::function<void(const BoostRound&, const NeuralNetwork& learner, const BoostState&)>;

/// Runs T boosting rounds and returns the depth-m network rescaled to l_1
/// budget B. Throws std::runtime_error("no progress") when b_T = 0.
BoostResult boostnet_train(const WeightedDataset& data, const NetworkClassSpec& spec,
                           const BoostConfig& config, std::uint64_t seed,
                           const BoostObserver& observer = {});

struct MarginCertificate {
  double min_margin = 0.0;
  double fraction = 0.0;  // share of points with margin >= gamma / 16
  double threshold = 0.0;
};

MarginCertificate margin_certificate(const NeuralNetwork& net, const NetworkClassSpec& spec,
                                     const WeightedDataset& data, double gamma);

/// Header t,mu_t,coefficient,train_zero_one,min_margin.
void write_rounds_csv(std::ostream& out, const std::vector<BoostRound>& rounds);

std::string to_string(WeakLearnerKind kind);
WeakLearnerKind parse_weak_learner(std::string_view name);
std::string to_string(WeightRule rule);
WeightRule parse_weight_rule(std::string_view name);

}  // namespace ncerm
