#include "ncerm/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ncerm {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::tanh:
      return "tanh";
    case Activation::erf:
      return "erf";
    case Activation::clamp:
      return "clamp";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "erf") return Activation::erf;
  if (name == "clamp") return Activation::clamp;
  throw std::invalid_argument("unknown activation: " + std::string(name));
}

LossFunction::LossFunction(LossKind kind, double lipschitz, Activation a)
    : kind_(kind), lipschitz_(lipschitz), activation_(a) {
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
    throw std::invalid_argument("Lipschitz constant must be positive and finite");
  }
}

LossFunction LossFunction::piecewise_linear(double lipschitz) {
  return LossFunction(LossKind::piecewise_linear, lipschitz);
}

LossFunction LossFunction::logistic_sigmoid(double lipschitz) {
  return LossFunction(LossKind::logistic_sigmoid, lipschitz);
}

LossFunction LossFunction::neg_min() { return LossFunction(LossKind::neg_min, 1.0); }

LossFunction LossFunction::from_activation(Activation a) {
  return LossFunction(LossKind::activation, 1.0, a);
}

double LossFunction::operator()(double t) const {
  switch (kind_) {
    case LossKind::piecewise_linear: {
      const double half_width = 0.5 / lipschitz_;
      if (t <= -half_width) return 0.0;
      if (t >= half_width) return 1.0;
      return lipschitz_ * t + 0.5;
    }
    case LossKind::logistic_sigmoid:
      return 1.0 / (1.0 + std::exp(-4.0 * lipschitz_ * t));
    case LossKind::neg_min:
      return std::min(0.0, t);
    case LossKind::activation:
      return activate(activation_, t);
  }
  return 0.0;
}

double LossFunction::derivative(double t) const {
  switch (kind_) {
    case LossKind::piecewise_linear: {
      const double half_width = 0.5 / lipschitz_;
      return (t >= -half_width && t < half_width) ? lipschitz_ : 0.0;
    }
    case LossKind::logistic_sigmoid: {
      const double h = 1.0 / (1.0 + std::exp(-4.0 * lipschitz_ * t));
      return 4.0 * lipschitz_ * h * (1.0 - h);
    }
    case LossKind::neg_min:
      return t < 0.0 ? 1.0 : 0.0;
    case LossKind::activation:
      return activate_derivative(activation_, t);
  }
  return 0.0;
}

std::string LossFunction::name() const {
  switch (kind_) {
    case LossKind::piecewise_linear:
      return "piecewise_linear";
    case LossKind::logistic_sigmoid:
      return "logistic_sigmoid";
    case LossKind::neg_min:
      return "neg_min";
    case LossKind::activation:
      return to_string(activation_);
  }
  return "unknown";
}

LossFunction parse_loss(std::string_view name, double lipschitz) {
  if (name == "piecewise_linear") return LossFunction::piecewise_linear(lipschitz);
  if (name == "logistic_sigmoid") return LossFunction::logistic_sigmoid(lipschitz);
  if (name == "neg_min") return LossFunction::neg_min();
  return LossFunction::from_activation(parse_activation(name));
}

double lp_norm(const Vector& v, double p) {
  if (std::isinf(p)) return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  if (p == 1.0) return v.lpNorm<1>();
  if (p == 2.0) return v.norm();
  const double scale = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  if (scale == 0.0) return 0.0;
  return scale * std::pow((v.cwiseAbs() / scale).array().pow(p).sum(), 1.0 / p);
}

double dual_exponent(double p) {
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

namespace {

double kahan_sum(const Vector& v) {
  long double sum = 0.0L;
  for (Eigen::Index i = 0; i < v.size(); ++i) sum += v[i];
  return static_cast<double>(sum);
}

}  // namespace

WeightedDataset::WeightedDataset(Matrix features, Vector labels, Vector weights, double q,
                                 bool norm_bounded)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      weights_(std::move(weights)),
      q_(q),
      norm_bounded_(norm_bounded) {
  const auto n = labels_.size();
  if (n < 1) throw std::invalid_argument("dataset must contain at least one point");
  if (features_.rows() != n || weights_.size() != n) {
    throw std::invalid_argument("features, labels and weights must have equal length");
  }
  if (!(q_ >= 1.0)) throw std::invalid_argument("norm exponent q must be >= 1");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (labels_[i] != 1.0 && labels_[i] != -1.0) {
      throw std::invalid_argument("labels must be -1 or +1");
    }
    if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i])) {
      throw std::invalid_argument("weights must be non-negative and finite");
    }
  }
  if (!features_.allFinite()) throw std::invalid_argument("features must be finite");
  if (std::abs(kahan_sum(weights_) - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "weights must sum to 1 (sum = " << kahan_sum(weights_) << ")";
    throw std::invalid_argument(msg.str());
  }
  if (norm_bounded_) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double norm = lp_norm(features_.row(i).transpose(), q_);
      if (norm > 1.0 + 1e-9) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "point " << i << " has q-norm " << norm << " > 1";
        throw std::invalid_argument(msg.str());
      }
    }
  }
}

WeightedDataset WeightedDataset::uniform(Matrix features, Vector labels, double q,
                                         bool norm_bounded) {
  const auto n = labels.size();
  Vector weights = Vector::Constant(n, n > 0 ? 1.0 / static_cast<double>(n) : 0.0);
  return WeightedDataset(std::move(features), std::move(labels), std::move(weights), q,
                         norm_bounded);
}

WeightedDataset WeightedDataset::with_weights(Vector weights) const {
  return WeightedDataset(features_, labels_, std::move(weights), q_, norm_bounded_);
}

WeightedDataset WeightedDataset::with_labels(Vector labels) const {
  return WeightedDataset(features_, std::move(labels), weights_, q_, norm_bounded_);
}

WeightedDataset WeightedDataset::subset(const std::vector<std::size_t>& indices) const {
  Matrix x(static_cast<Eigen::Index>(indices.size()), features_.cols());
  Vector y(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= size()) throw std::out_of_range("subset index out of range");
    const auto i = static_cast<Eigen::Index>(indices[r]);
    x.row(static_cast<Eigen::Index>(r)) = features_.row(i);
    y[static_cast<Eigen::Index>(r)] = labels_[i];
  }
  return uniform(std::move(x), std::move(y), q_, norm_bounded_);
}

Vector predict_all(const Predictor& predict, const Matrix& features) {
  Vector scores(features.rows());
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    scores[i] = predict(features.row(i).transpose());
  }
  return scores;
}

namespace {

void check_scores(const Vector& scores, const WeightedDataset& data) {
  if (data.empty()) throw std::invalid_argument("empty dataset");
  if (static_cast<std::size_t>(scores.size()) != data.size()) {
    throw std::invalid_argument("score vector length does not match dataset");
  }
  if (!scores.allFinite()) throw NumericError("non-finite prediction (numeric overflow)");
}

}  // namespace

double empirical_risk(const Vector& scores, const LossFunction& loss,
                      const WeightedDataset& data) {
  check_scores(scores, data);
  const Vector& y = data.labels();
  const Vector& alpha = data.weights();
  double risk = 0.0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    risk += alpha[i] * loss(-y[i] * scores[i]);
  }
  return risk;
}

double empirical_risk(const Predictor& predict, const LossFunction& loss,
                      const WeightedDataset& data) {
  return empirical_risk(predict_all(predict, data.features()), loss, data);
}

double zero_one_risk(const Vector& scores, const WeightedDataset& data) {
  check_scores(scores, data);
  double risk = 0.0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (-data.labels()[i] * scores[i] >= 0.0) risk += data.weights()[i];
  }
  return risk;
}

double zero_one_risk(const Predictor& predict, const WeightedDataset& data) {
  return zero_one_risk(predict_all(predict, data.features()), data);
}

MarginStats margin_stats(const Vector& scores, const WeightedDataset& data) {
  check_scores(scores, data);
  const Vector margins = data.labels().cwiseProduct(scores);
  return {margins.minCoeff(), margins.dot(data.weights())};
}

MarginStats margin_stats(const Predictor& predict, const WeightedDataset& data) {
  return margin_stats(predict_all(predict, data.features()), data);
}

}  // namespace ncerm
