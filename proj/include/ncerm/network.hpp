#pragma once

#include <string>
#include <vector>

#include "ncerm/activation.hpp"
#include "ncerm/loss.hpp"
#include "ncerm/random.hpp"

namespace ncerm {

/// Depth-m networks whose leaves are l_p-bounded linear maps and whose
/// hidden units combine activated children with l_1-bounded weights.
struct NetworkClassSpec {
  int depth = 2;
  double budget = 1.0;  // B, applied at every level
  double leaf_p = 2.0;  // in (1, 2]
  Activation activation = Activation::tanh;

  double input_q() const { return dual_exponent(leaf_p); }
  /// Same class with a different depth (weak learners use depth - 1).
  NetworkClassSpec with_depth(int m) const {
    NetworkClassSpec s = *this;
    s.depth = m;
    return s;
  }
};

/// Leaf(w): x -> <w, x>. Node(children, c): x -> sum_l c_l sigma(child_l(x)).
class NeuralNetwork {
 public:
  NeuralNetwork() = default;

  static NeuralNetwork leaf(Vector w);
  static NeuralNetwork node(std::vector<NeuralNetwork> children, Vector weights);

  bool is_leaf() const { return children_.empty(); }
  /// Leaf weights or combination weights.
  const Vector& weights() const { return weights_; }
  Vector& weights() { return weights_; }
  const std::vector<NeuralNetwork>& children() const { return children_; }
  std::vector<NeuralNetwork>& children() { return children_; }

  int depth() const;
  Eigen::Index input_dim() const;
  /// Number of leaves, i.e. first-layer units.
  std::size_t leaf_count() const;

 private:
  Vector weights_;
  std::vector<NeuralNetwork> children_;
};

double evaluate(const NeuralNetwork& net, const NetworkClassSpec& spec, const Vector& x);
/// Row-wise evaluation over a feature matrix.
Vector evaluate_all(const NeuralNetwork& net, const NetworkClassSpec& spec, const Matrix& features);

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> problems;

  explicit operator bool() const { return ok; }
};

ValidationReport validate(const NeuralNetwork& net, const NetworkClassSpec& spec);

/// A random member of the class: every leaf has ||w||_p = B, every node
/// has `width` children and ||c||_1 = B with random signs.
NeuralNetwork random_network(const NetworkClassSpec& spec, Eigen::Index input_dim, int width,
                             Rng& rng);

/// JSON tree: {"type":"leaf","w":[...]} or {"type":"node","weights":[...],"children":[...]}.
std::string to_json(const NeuralNetwork& net);
NeuralNetwork network_from_json(const std::string& text);

}  // namespace ncerm
