#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ncerm/boostnet.hpp"
#include "ncerm/data.hpp"

namespace ncerm {

struct BackpropConfig {
  std::vector<double> learning_rates{0.1, 0.5};
  int epochs = 100;
  std::vector<int> hidden_units{5, 10, 25, 50};
};

struct ParityConfig {
  int d = 10;
  int p = 3;
  std::size_t n = 5000;
  double noise = 0.1;
  double budget = 10.0;  // B for the two-layer networks
  int hidden_budget = 50;
  int restarts = 3;  // independent runs per method, best kept on validation
  WeakLearnerBudget weak{WeakLearnerKind::algorithm2, 1, 20, 10, 2};
  bool run_boostnet = true;
  bool run_backprop = true;
  bool run_linear = true;     // least-squares linear fit
  bool run_halfspace = true;  // non-convex halfspace by random restarts
  BackpropConfig backprop;
  std::uint64_t linear_rounds = 200;
  int linear_refine = 50;
  std::uint64_t seed = 0;
};

struct ParityRow {
  std::string method;  // boostnet, backprop, linear or halfspace
  int hidden_units = 0;
  double test_error = 0.0;
  double validation_error = 0.0;
};

struct ParitySplit {
  WeightedDataset train;
  WeightedDataset validation;
  WeightedDataset test;
};

/// 50/10/40 split of the rows in generation order.
ParitySplit split_parity(const WeightedDataset& data);

/// Rows ordered by method (boostnet, backprop, linear, halfspace) then
/// hidden units.
/// BoostNet reports every prefix of its hidden units; for each unit count
/// the restart with the lowest validation error is kept.
std::vector<ParityRow> run_parity_experiment(const ParityConfig& config);

/// Full-batch gradient descent on the squared loss for
/// f(x) = sum_l c_l tanh(<w_l, x>), weights initialized uniform(-0.5, 0.5).
struct TwoLayerNet {
  Matrix w;  // d x units
  Vector c;  // units
  Vector scores(const Matrix& features) const;
};
TwoLayerNet train_backprop(const WeightedDataset& train, int units, double learning_rate, int epochs,
                           std::uint64_t seed);

/// Header method,hidden_units,test_error.
void write_parity_csv(std::ostream& out, const std::vector<ParityRow>& rows);

}  // namespace ncerm
