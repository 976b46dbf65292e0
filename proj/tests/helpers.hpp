#pragma once

#include <initializer_list>
#include <vector>

#include "ncerm/loss.hpp"
#include "ncerm/random.hpp"

namespace testing {

inline ncerm::Matrix rows(std::initializer_list<std::initializer_list<double>> values) {
  const auto n = static_cast<Eigen::Index>(values.size());
  const auto d = static_cast<Eigen::Index>(values.begin()->size());
  ncerm::Matrix m(n, d);
  Eigen::Index i = 0;
  for (const auto& r : values) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline ncerm::Vector vec(std::initializer_list<double> values) {
  ncerm::Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline double uniform01(ncerm::Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace testing
