#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ncerm/activation.hpp"

namespace ncerm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when a prediction or intermediate value is NaN or infinite.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LossKind {
  piecewise_linear,  // 0 below -1/(2L), 1 above 1/(2L), Lx + 1/2 between
  logistic_sigmoid,  // 1 / (1 + exp(-4Lx))
  neg_min,           // min{0, x}
  activation,        // an odd activation used as a loss (boosting edges)
};

/// An L-Lipschitz scalar function h applied to -y f(x).
class LossFunction {
 public:
  static LossFunction piecewise_linear(double lipschitz);
  static LossFunction logistic_sigmoid(double lipschitz);
  static LossFunction neg_min();
  static LossFunction from_activation(Activation a);

  double operator()(double t) const;
  /// Derivative, taking the right-hand slope at kinks.
  double derivative(double t) const;

  LossKind kind() const { return kind_; }
  double lipschitz() const { return lipschitz_; }
  Activation activation() const { return activation_; }
  std::string name() const;

 private:
  LossFunction(LossKind kind, double lipschitz, Activation a = Activation::tanh);

  LossKind kind_;
  double lipschitz_;
  Activation activation_;
};

/// Parses "piecewise_linear", "logistic_sigmoid", "neg_min", "tanh", "erf", "clamp".
LossFunction parse_loss(std::string_view name, double lipschitz);

/// n labeled points in R^d with importance weights summing to one.
class WeightedDataset {
 public:
  WeightedDataset() = default;

  /// Validates every invariant; throws std::invalid_argument on violation.
  /// When `norm_bounded` is set, each row must satisfy ||x_i||_q <= 1 + 1e-9.
  WeightedDataset(Matrix features, Vector labels, Vector weights, double q = 2.0,
                  bool norm_bounded = true);

  static WeightedDataset uniform(Matrix features, Vector labels, double q = 2.0,
                                 bool norm_bounded = true);

  std::size_t size() const { return static_cast<std::size_t>(labels_.size()); }
  bool empty() const { return labels_.size() == 0; }
  Eigen::Index dim() const { return features_.cols(); }
  double q() const { return q_; }
  bool norm_bounded() const { return norm_bounded_; }

  const Matrix& features() const { return features_; }
  const Vector& labels() const { return labels_; }
  const Vector& weights() const { return weights_; }
  Vector point(std::size_t i) const { return features_.row(static_cast<Eigen::Index>(i)).transpose(); }

  WeightedDataset with_weights(Vector weights) const;
  WeightedDataset with_labels(Vector labels) const;
  /// Rows `indices`, uniformly weighted.
  WeightedDataset subset(const std::vector<std::size_t>& indices) const;

 private:
  Matrix features_;
  Vector labels_;
  Vector weights_;
  double q_ = 2.0;
  bool norm_bounded_ = true;
};

/// ||v||_q for q in [1, inf]; q = inf is accepted as std::numeric_limits<double>::infinity().
double lp_norm(const Vector& v, double p);

/// Dual exponent q with 1/p + 1/q = 1.
double dual_exponent(double p);

using Predictor = std::function<double(const Vector&)>;

/// f(x_i) for every row; throws NumericError on a non-finite value.
Vector predict_all(const Predictor& predict, const Matrix& features);

/// sum_i alpha_i h(-y_i s_i) for precomputed scores s_i = f(x_i).
double empirical_risk(const Vector& scores, const LossFunction& loss, const WeightedDataset& data);
double empirical_risk(const Predictor& predict, const LossFunction& loss, const WeightedDataset& data);

/// sum_i alpha_i 1[-y_i s_i >= 0].
double zero_one_risk(const Vector& scores, const WeightedDataset& data);
double zero_one_risk(const Predictor& predict, const WeightedDataset& data);

struct MarginStats {
  double min_margin = 0.0;
  double mean_margin = 0.0;  // importance-weighted
};

MarginStats margin_stats(const Vector& scores, const WeightedDataset& data);
MarginStats margin_stats(const Predictor& predict, const WeightedDataset& data);

}  // namespace ncerm
