#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ncerm/data.hpp"
#include "ncerm/halfspace.hpp"
#include "ncerm/network.hpp"

namespace ncerm {

struct Alg3Config {
  int k = 1;  // resample size, ceil(q / eps^2)
  int s = 1;  // children per hidden unit, ceil(1 / eps^2)
  RoundCount t_theory;
  /// Exponent k (s^m - 1) / (s - 1) of the round bound (k m when s = 1).
  double exponent = 1.0;
};

Alg3Config config_alg3(double q, double epsilon, double delta, int depth);

/// One random candidate built bottom-up on the batch: leaves fit a random
/// target in [-B, B]^k under ||w||_p <= B; hidden units fit a random target
/// with ||c||_1 <= B over their children's activated outputs.
NeuralNetwork generate_candidate(const SampleBatch& batch, const NetworkClassSpec& spec, int depth,
                                 int s, Rng& rng);

/// Joint projected gradient descent on all weights, projecting each leaf onto
/// its l_p ball and each hidden unit onto its l_1 ball. Only loss-decreasing
/// steps are accepted. A bare leaf is refined exactly as a LinearModel.
NeuralNetwork refine(const NeuralNetwork& net, const NetworkClassSpec& spec,
                     const WeightedDataset& data, const LossFunction& loss, int step_budget,
                     std::vector<double>* trace = nullptr);

struct Algorithm3Options {
  std::uint64_t t_budget = 1;
  int refine_budget = 0;
  std::uint64_t seed = 0;
  int k_override = 0;  // 0 keeps the closed-form value
  int s_override = 0;
  std::function<void(std::uint64_t round, const NeuralNetwork&, double loss)> on_round;
};

struct NetworkFitResult {
  NeuralNetwork network;
  double loss = 0.0;
  std::uint64_t rounds = 0;
  std::uint64_t best_round = 0;
  Alg3Config config;
};

/// Best of min(T_theory, t_budget) refined candidates.
NetworkFitResult algorithm3(const WeightedDataset& data, const LossFunction& loss,
                            const NetworkClassSpec& spec, double epsilon, double delta,
                            const Algorithm3Options& options);

}  // namespace ncerm
