#include "ncerm/neuralnet.hpp"

#include <cmath>
#include <limits>

namespace ncerm {

Alg3Config config_alg3(double q, double epsilon, double delta, int depth) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (depth < 1) throw std::invalid_argument("depth must be positive");
  if (!(q >= 1.0) || std::isinf(q)) throw std::invalid_argument("q must be finite and >= 1");
  Alg3Config config;
  const double eps2 = epsilon * epsilon;
  config.k = static_cast<int>(std::ceil(q / eps2));
  config.s = static_cast<int>(std::ceil(1.0 / eps2));
  if (config.s == 1) {
    config.exponent = static_cast<double>(config.k) * depth;
  } else {
    const double s = config.s;
    config.exponent = config.k * (std::pow(s, depth) - 1.0) / (s - 1.0);
  }
  config.t_theory = RoundCount::from_power(5.0, 4.0 / epsilon, config.exponent, -std::log(delta));
  return config;
}

NeuralNetwork generate_candidate(const SampleBatch& batch, const NetworkClassSpec& spec, int depth,
                                 int s, Rng& rng) {
  if (depth < 1) throw std::invalid_argument("generate_candidate: depth must be positive");
  const auto k = static_cast<Eigen::Index>(batch.size());
  if (depth == 1) {
    const Vector u = uniform_cube(rng, k, spec.budget);
    return NeuralNetwork::leaf(
        constrained_least_squares(batch.features, u, spec.leaf_p, spec.budget));
  }
  if (s < 1) throw std::invalid_argument("generate_candidate: width must be positive");
  std::vector<NeuralNetwork> children;
  children.reserve(static_cast<std::size_t>(s));
  Matrix activated(k, s);
  for (int l = 0; l < s; ++l) {
    children.push_back(generate_candidate(batch, spec, depth - 1, s, rng));
    const Vector inner = evaluate_all(children.back(), spec, batch.features);
    for (Eigen::Index j = 0; j < k; ++j) activated(j, l) = activate(spec.activation, inner[j]);
  }
  const Vector u = uniform_cube(rng, k, spec.budget);
  Vector c = constrained_least_squares(activated, u, 1.0, spec.budget, /*l1_mode=*/true);
  return NeuralNetwork::node(std::move(children), std::move(c));
}

namespace {

// Forward pass cache mirroring the network tree.
struct Trace {
  Vector z;  // pre-activation output of this subnetwork on every point
  std::vector<Trace> children;
};

Trace forward(const NeuralNetwork& net, const NetworkClassSpec& spec, const Matrix& x) {
  Trace trace;
  if (net.is_leaf()) {
    trace.z = x * net.weights();
    return trace;
  }
  trace.z = Vector::Zero(x.rows());
  for (std::size_t l = 0; l < net.children().size(); ++l) {
    trace.children.push_back(forward(net.children()[l], spec, x));
    const Vector& inner = trace.children.back().z;
    const double c = net.weights()[static_cast<Eigen::Index>(l)];
    for (Eigen::Index i = 0; i < inner.size(); ++i) {
      trace.z[i] += c * activate(spec.activation, inner[i]);
    }
  }
  return trace;
}

// Writes d(risk)/d(weights) into `grad`, which has the same shape as `net`.
void backward(const NeuralNetwork& net, const NetworkClassSpec& spec, const Matrix& x,
              const Trace& trace, const Vector& upstream, NeuralNetwork& grad) {
  if (net.is_leaf()) {
    grad.weights() = x.transpose() * upstream;
    return;
  }
  for (std::size_t l = 0; l < net.children().size(); ++l) {
    const Vector& inner = trace.children[l].z;
    const double c = net.weights()[static_cast<Eigen::Index>(l)];
    double dc = 0.0;
    Vector child_upstream(inner.size());
    for (Eigen::Index i = 0; i < inner.size(); ++i) {
      dc += upstream[i] * activate(spec.activation, inner[i]);
      child_upstream[i] = upstream[i] * c * activate_derivative(spec.activation, inner[i]);
    }
    grad.weights()[static_cast<Eigen::Index>(l)] = dc;
    backward(net.children()[l], spec, x, trace.children[l], child_upstream, grad.children()[l]);
  }
}

double squared_norm(const NeuralNetwork& net) {
  double total = net.weights().squaredNorm();
  for (const auto& child : net.children()) total += squared_norm(child);
  return total;
}

NeuralNetwork projected_step(const NeuralNetwork& net, const NeuralNetwork& grad, double step,
                             const NetworkClassSpec& spec) {
  const Vector moved = net.weights() - step * grad.weights();
  if (net.is_leaf()) return NeuralNetwork::leaf(project_lp(moved, spec.leaf_p, spec.budget));
  std::vector<NeuralNetwork> children;
  children.reserve(net.children().size());
  for (std::size_t l = 0; l < net.children().size(); ++l) {
    children.push_back(projected_step(net.children()[l], grad.children()[l], step, spec));
  }
  return NeuralNetwork::node(std::move(children), project_l1(moved, spec.budget));
}

}  // namespace

NeuralNetwork refine(const NeuralNetwork& net, const NetworkClassSpec& spec,
                     const WeightedDataset& data, const LossFunction& loss, int step_budget,
                     std::vector<double>* trace) {
  if (net.is_leaf()) {
    const LinearModel refined =
        refine(LinearModel{net.weights(), spec.leaf_p, spec.budget}, data, loss, step_budget, trace);
    return NeuralNetwork::leaf(refined.w);
  }
  const Matrix& x = data.features();
  const Vector& y = data.labels();
  const Vector& alpha = data.weights();

  NeuralNetwork current = net;
  Trace cache = forward(current, spec, x);
  double value = empirical_risk(cache.z, loss, data);
  if (trace) trace->push_back(value);
  double step = 1.0;
  NeuralNetwork grad = current;
  for (int it = 0; it < step_budget; ++it) {
    Vector upstream(cache.z.size());
    for (Eigen::Index i = 0; i < upstream.size(); ++i) {
      upstream[i] = -alpha[i] * y[i] * loss.derivative(-y[i] * cache.z[i]);
    }
    backward(current, spec, x, cache, upstream, grad);
    if (squared_norm(grad) == 0.0) break;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      NeuralNetwork candidate = projected_step(current, grad, step, spec);
      Trace candidate_cache = forward(candidate, spec, x);
      const double candidate_value = empirical_risk(candidate_cache.z, loss, data);
      if (candidate_value < value) {
        current = std::move(candidate);
        cache = std::move(candidate_cache);
        value = candidate_value;
        accepted = true;
        step = std::min(step * 2.0, 1e6);
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    if (trace) trace->push_back(value);
  }
  return current;
}

NetworkFitResult algorithm3(const WeightedDataset& data, const LossFunction& loss,
                            const NetworkClassSpec& spec, double epsilon, double delta,
                            const Algorithm3Options& options) {
  if (data.empty()) throw std::invalid_argument("empty dataset");
  const double q = spec.input_q();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (lp_norm(data.point(i), q) > 1.0 + 1e-9) {
      throw std::invalid_argument("points must lie in the unit l_q ball");
    }
  }
  NetworkFitResult result;
  result.config = config_alg3(q, epsilon, delta, spec.depth);
  const int k = options.k_override > 0 ? options.k_override : result.config.k;
  const int s = options.s_override > 0 ? options.s_override : result.config.s;
  result.rounds = result.config.t_theory.capped(options.t_budget);
  if (result.rounds == 0) throw std::invalid_argument("round budget must be positive");

  const ImportanceSampler sampler(data);
  result.loss = std::numeric_limits<double>::infinity();
  for (std::uint64_t t = 0; t < result.rounds; ++t) {
    // Shares the per-round stream with algorithm2 so depth-1 runs coincide.
    Rng rng(derive_seed(options.seed, stream::kResampledRounds, t));
    const SampleBatch batch = sampler.draw(static_cast<std::size_t>(k), rng);
    NeuralNetwork candidate = generate_candidate(batch, spec, spec.depth, s, rng);
    if (options.refine_budget > 0) {
      candidate = refine(candidate, spec, data, loss, options.refine_budget);
    }
    const double value = empirical_risk(evaluate_all(candidate, spec, data.features()), loss, data);
    if (options.on_round) options.on_round(t, candidate, value);
    if (value < result.loss) {
      result.loss = value;
      result.network = std::move(candidate);
      result.best_round = t;
    }
  }
  return result;
}

}  // namespace ncerm
