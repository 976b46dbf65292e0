#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

namespace ncerm {

/// Odd, 1-Lipschitz squashing functions with range [-1, 1].
enum class Activation { tanh, erf, clamp };

inline double activate(Activation a, double x) {
  switch (a) {
    case Activation::tanh:
      return std::tanh(x);
    case Activation::erf:
      // Rescaled so the slope at the origin (the steepest point) is 1.
      return std::erf(0.5 * std::sqrt(std::numbers::pi) * x);
    case Activation::clamp:
      return x < -1.0 ? -1.0 : (x > 1.0 ? 1.0 : x);
  }
  return 0.0;
}

/// Derivative; at the kinks of clamp this is the slope of the right piece.
inline double activate_derivative(Activation a, double x) {
  switch (a) {
    case Activation::tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Activation::erf: {
      const double c = 0.5 * std::sqrt(std::numbers::pi);
      return std::exp(-c * c * x * x);
    }
    case Activation::clamp:
      return (x >= -1.0 && x < 1.0) ? 1.0 : 0.0;
  }
  return 0.0;
}

std::string to_string(Activation a);
Activation parse_activation(std::string_view name);

}  // namespace ncerm
