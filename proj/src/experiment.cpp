#include "ncerm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include "ncerm/csv.hpp"
#include "ncerm/halfspace.hpp"

namespace ncerm {

ParitySplit split_parity(const WeightedDataset& data) {
  const std::size_t n = data.size();
  const std::size_t n_train = n / 2;
  const std::size_t n_val = n / 10;
  if (n_train == 0 || n_val == 0 || n_train + n_val >= n) {
    throw std::invalid_argument("parity experiment needs at least 10 points");
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const auto part = [&](std::size_t from, std::size_t to) {
    return data.subset(std::vector<std::size_t>(idx.begin() + static_cast<std::ptrdiff_t>(from),
                                                idx.begin() + static_cast<std::ptrdiff_t>(to)));
  };
  return {part(0, n_train), part(n_train, n_train + n_val), part(n_train + n_val, n)};
}

Vector TwoLayerNet::scores(const Matrix& features) const {
  return (features * w).array().tanh().matrix() * c;
}

TwoLayerNet train_backprop(const WeightedDataset& train, int units, double learning_rate, int epochs,
                           std::uint64_t seed) {
  if (units < 1 || epochs < 0 || !(learning_rate > 0.0)) {
    throw std::invalid_argument("backprop needs units >= 1, epochs >= 0, learning rate > 0");
  }
  Rng rng(seed);
  std::uniform_real_distribution<double> init(-0.5, 0.5);
  const Matrix& x = train.features();
  const Vector& y = train.labels();
  const auto n = static_cast<double>(train.size());
  TwoLayerNet net;
  net.w.resize(x.cols(), units);
  net.c.resize(units);
  for (Eigen::Index j = 0; j < net.w.cols(); ++j) {
    for (Eigen::Index i = 0; i < net.w.rows(); ++i) net.w(i, j) = init(rng);
  }
  for (Eigen::Index j = 0; j < units; ++j) net.c[j] = init(rng);

  for (int epoch = 0; epoch < epochs; ++epoch) {
    const Matrix hidden = (x * net.w).array().tanh().matrix();
    const Vector residual = hidden * net.c - y;  // d/df of (f - y)^2 / 2
    const Vector grad_c = hidden.transpose() * residual / n;
    const Matrix back = ((residual * net.c.transpose()).array() * (1.0 - hidden.array().square())).matrix();
    const Matrix grad_w = x.transpose() * back / n;
    net.c -= learning_rate * grad_c;
    net.w -= learning_rate * grad_w;
    if (!net.c.allFinite() || !net.w.allFinite()) throw NumericError("backprop diverged");
  }
  return net;
}

namespace {

double error_rate(const Vector& scores, const WeightedDataset& data) {
  return zero_one_risk(scores, data);
}

struct Best {
  double validation = std::numeric_limits<double>::infinity();
  double test = 0.0;
  void offer(double v, double t) {
    if (v < validation) {
      validation = v;
      test = t;
    }
  }
};

void run_boostnet(const ParitySplit& split, const ParityConfig& config,
                  std::vector<ParityRow>& rows) {
  NetworkClassSpec spec;
  spec.depth = 2;
  spec.budget = config.budget;
  spec.leaf_p = 2.0;
  spec.activation = Activation::tanh;
  BoostConfig boost;
  boost.rounds = static_cast<std::uint64_t>(config.hidden_budget);
  boost.weak = config.weak;

  std::vector<Best> best(static_cast<std::size_t>(config.hidden_budget));
  for (int r = 0; r < config.restarts; ++r) {
    Vector val_scores = Vector::Zero(static_cast<Eigen::Index>(split.validation.size()));
    Vector test_scores = Vector::Zero(static_cast<Eigen::Index>(split.test.size()));
    const NetworkClassSpec weak_spec = spec.with_depth(1);
    auto observer = [&](const BoostRound& round, const NeuralNetwork& learner, const BoostState&) {
      const auto add = [&](Vector& scores, const WeightedDataset& data) {
        const Vector inner = evaluate_all(learner, weak_spec, data.features());
        scores += round.coefficient * inner.array().tanh().matrix();
      };
      add(val_scores, split.validation);
      add(test_scores, split.test);
      best[round.t - 1].offer(error_rate(val_scores, split.validation),
                              error_rate(test_scores, split.test));
    };
    try {
      boostnet_train(split.train, spec, boost,
                     derive_seed(config.seed, stream::kBoostRound, static_cast<std::uint64_t>(r)),
                     observer);
    } catch (const std::runtime_error& e) {
      if (std::string(e.what()) != "no progress") throw;
    }
  }
  for (std::size_t u = 0; u < best.size(); ++u) {
    if (std::isinf(best[u].validation)) continue;
    rows.push_back({"boostnet", static_cast<int>(u + 1), best[u].test, best[u].validation});
  }
}

void run_backprop(const ParitySplit& split, const ParityConfig& config,
                  std::vector<ParityRow>& rows) {
  std::vector<int> units = config.backprop.hidden_units;
  std::sort(units.begin(), units.end());
  units.erase(std::unique(units.begin(), units.end()), units.end());
  for (int u : units) {
    if (u < 1 || u > config.hidden_budget) continue;
    Best best;
    for (std::size_t l = 0; l < config.backprop.learning_rates.size(); ++l) {
      for (int r = 0; r < config.restarts; ++r) {
        const std::uint64_t seed =
            derive_seed(config.seed, stream::kBackprop,
                        (static_cast<std::uint64_t>(u) << 32) | (l << 16) | static_cast<std::uint64_t>(r));
        try {
          const TwoLayerNet net = train_backprop(split.train, u, config.backprop.learning_rates[l],
                                                 config.backprop.epochs, seed);
          best.offer(error_rate(net.scores(split.validation.features()), split.validation),
                     error_rate(net.scores(split.test.features()), split.test));
        } catch (const NumericError&) {
          // A diverged learning rate simply loses the validation comparison.
        }
      }
    }
    if (!std::isinf(best.validation)) rows.push_back({"backprop", u, best.test, best.validation});
  }
}

void run_linear(const ParitySplit& split, std::vector<ParityRow>& rows) {
  const Matrix& x = split.train.features();
  const Vector w = x.completeOrthogonalDecomposition().solve(split.train.labels());
  rows.push_back({"linear", 0, error_rate(split.test.features() * w, split.test),
                  error_rate(split.validation.features() * w, split.validation)});
}

void run_halfspace(const ParitySplit& split, const ParityConfig& config,
                   std::vector<ParityRow>& rows) {
  const LossFunction loss = LossFunction::piecewise_linear(1.0);
  Best best;
  for (int r = 0; r < config.restarts; ++r) {
    HalfspaceRunConfig run = config_alg2(split.train.size(), static_cast<int>(split.train.dim()), 2.0,
                                         0.5, 0.1);
    run.k = config.weak.k;
    run.t_budget = config.linear_rounds;
    run.seed = derive_seed(config.seed, stream::kResampledRounds, static_cast<std::uint64_t>(r));
    HalfspaceOptions options;
    options.refine_budget = config.linear_refine;
    const HalfspaceResult fit = algorithm2(split.train, loss, run, options);
    best.offer(error_rate(fit.model.scores(split.validation.features()), split.validation),
               error_rate(fit.model.scores(split.test.features()), split.test));
  }
  rows.push_back({"halfspace", 0, best.test, best.validation});
}

}  // namespace

std::vector<ParityRow> run_parity_experiment(const ParityConfig& config) {
  if (config.hidden_budget < 1) throw std::invalid_argument("hidden budget must be positive");
  if (config.restarts < 1) throw std::invalid_argument("restarts must be positive");
  const ParityDataset generated = parity_dataset(config.d, config.p, config.n, config.noise,
                                                 derive_seed(config.seed, stream::kData, 0));
  const ParitySplit split = split_parity(generated.data);
  std::vector<ParityRow> rows;
  if (config.run_boostnet) run_boostnet(split, config, rows);
  if (config.run_backprop) run_backprop(split, config, rows);
  if (config.run_linear) run_linear(split, rows);
  if (config.run_halfspace) run_halfspace(split, config, rows);
  return rows;
}

void write_parity_csv(std::ostream& out, const std::vector<ParityRow>& rows) {
  csv::Writer writer(out);
  writer.header({"method", "hidden_units", "test_error"});
  for (const auto& row : rows) {
    writer.row({row.method, std::to_string(row.hidden_units), csv::format(row.test_error)});
  }
}

}  // namespace ncerm
