#include "ncerm/network.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace ncerm {

NeuralNetwork NeuralNetwork::leaf(Vector w) {
  NeuralNetwork net;
  net.weights_ = std::move(w);
  return net;
}

NeuralNetwork NeuralNetwork::node(std::vector<NeuralNetwork> children, Vector weights) {
  if (children.empty()) throw std::invalid_argument("node requires at least one child");
  if (weights.size() != static_cast<Eigen::Index>(children.size())) {
    throw std::invalid_argument("node weights must match the number of children");
  }
  NeuralNetwork net;
  net.weights_ = std::move(weights);
  net.children_ = std::move(children);
  return net;
}

int NeuralNetwork::depth() const {
  int deepest = 0;
  for (const auto& child : children_) deepest = std::max(deepest, child.depth());
  return deepest + 1;
}

Eigen::Index NeuralNetwork::input_dim() const {
  return is_leaf() ? weights_.size() : children_.front().input_dim();
}

std::size_t NeuralNetwork::leaf_count() const {
  if (is_leaf()) return 1;
  std::size_t count = 0;
  for (const auto& child : children_) count += child.leaf_count();
  return count;
}

double evaluate(const NeuralNetwork& net, const NetworkClassSpec& spec, const Vector& x) {
  if (x.size() != net.input_dim()) throw std::invalid_argument("evaluate: dimension mismatch");
  if (net.is_leaf()) return net.weights().dot(x);
  double value = 0.0;
  const auto& children = net.children();
  for (std::size_t l = 0; l < children.size(); ++l) {
    value += net.weights()[static_cast<Eigen::Index>(l)] *
             activate(spec.activation, evaluate(children[l], spec, x));
  }
  return value;
}

Vector evaluate_all(const NeuralNetwork& net, const NetworkClassSpec& spec,
                    const Matrix& features) {
  if (features.cols() != net.input_dim()) {
    throw std::invalid_argument("evaluate: dimension mismatch");
  }
  if (net.is_leaf()) return features * net.weights();
  Vector value = Vector::Zero(features.rows());
  const auto& children = net.children();
  for (std::size_t l = 0; l < children.size(); ++l) {
    const double c = net.weights()[static_cast<Eigen::Index>(l)];
    const Vector inner = evaluate_all(children[l], spec, features);
    for (Eigen::Index i = 0; i < inner.size(); ++i) {
      value[i] += c * activate(spec.activation, inner[i]);
    }
  }
  return value;
}

namespace {

void validate_into(const NeuralNetwork& net, const NetworkClassSpec& spec, Eigen::Index dim,
                   const std::string& path, ValidationReport& report) {
  auto fail = [&](const std::string& what) {
    report.ok = false;
    report.problems.push_back(path + ": " + what);
  };
  if (!net.weights().allFinite()) fail("non-finite weights");
  if (net.is_leaf()) {
    if (net.weights().size() != dim) fail("leaf input dimension mismatch");
    const double norm = lp_norm(net.weights(), spec.leaf_p);
    if (norm > spec.budget + 1e-9) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "leaf l_p norm " << norm << " exceeds budget " << spec.budget;
      fail(msg.str());
    }
    return;
  }
  const double norm = net.weights().lpNorm<1>();
  if (norm > spec.budget + 1e-9) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "node l_1 norm " << norm << " exceeds budget " << spec.budget;
    fail(msg.str());
  }
  for (std::size_t l = 0; l < net.children().size(); ++l) {
    validate_into(net.children()[l], spec, dim, path + "/" + std::to_string(l), report);
  }
}

}  // namespace

ValidationReport validate(const NeuralNetwork& net, const NetworkClassSpec& spec) {
  ValidationReport report;
  if (net.depth() > spec.depth) {
    report.ok = false;
    report.problems.push_back("depth " + std::to_string(net.depth()) + " exceeds " +
                              std::to_string(spec.depth));
  }
  validate_into(net, spec, net.input_dim(), "root", report);
  return report;
}

namespace {

NeuralNetwork random_subnetwork(const NetworkClassSpec& spec, int depth, Eigen::Index input_dim,
                                int width, Rng& rng) {
  if (depth <= 1) {
    Vector w = gaussian_vector(rng, input_dim);
    const double norm = lp_norm(w, spec.leaf_p);
    if (norm > 0.0) w *= spec.budget / norm;
    return NeuralNetwork::leaf(std::move(w));
  }
  std::vector<NeuralNetwork> children;
  children.reserve(static_cast<std::size_t>(width));
  for (int l = 0; l < width; ++l) {
    children.push_back(random_subnetwork(spec, depth - 1, input_dim, width, rng));
  }
  std::uniform_real_distribution<double> magnitude(0.1, 1.0);
  std::bernoulli_distribution sign(0.5);
  Vector c(width);
  for (int l = 0; l < width; ++l) c[l] = (sign(rng) ? 1.0 : -1.0) * magnitude(rng);
  c *= spec.budget / c.lpNorm<1>();
  return NeuralNetwork::node(std::move(children), std::move(c));
}

}  // namespace

NeuralNetwork random_network(const NetworkClassSpec& spec, Eigen::Index input_dim, int width,
                             Rng& rng) {
  if (width < 1) throw std::invalid_argument("random_network: width must be positive");
  return random_subnetwork(spec, spec.depth, input_dim, width, rng);
}

namespace {

using nlohmann::json;

json tree_to_json(const NeuralNetwork& net) {
  std::vector<double> w(net.weights().data(), net.weights().data() + net.weights().size());
  if (net.is_leaf()) return json{{"type", "leaf"}, {"w", w}};
  json children = json::array();
  for (const auto& child : net.children()) children.push_back(tree_to_json(child));
  return json{{"type", "node"}, {"weights", w}, {"children", children}};
}

Vector vector_from_json(const json& values) {
  const auto v = values.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

NeuralNetwork tree_from_json(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "leaf") return NeuralNetwork::leaf(vector_from_json(j.at("w")));
  if (type != "node") throw std::invalid_argument("unknown network node type: " + type);
  std::vector<NeuralNetwork> children;
  for (const auto& child : j.at("children")) children.push_back(tree_from_json(child));
  return NeuralNetwork::node(std::move(children), vector_from_json(j.at("weights")));
}

}  // namespace

std::string to_json(const NeuralNetwork& net) { return tree_to_json(net).dump(); }

NeuralNetwork network_from_json(const std::string& text) {
  return tree_from_json(json::parse(text));
}

}  // namespace ncerm
