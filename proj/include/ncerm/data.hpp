#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ncerm/loss.hpp"
#include "ncerm/network.hpp"
#include "ncerm/random.hpp"
#include "ncerm/solvers.hpp"

namespace ncerm {

/// k points drawn with replacement from a dataset.
struct SampleBatch {
  Matrix features;
  Vector labels;
  std::vector<std::size_t> indices;  // source row of each draw

  std::size_t size() const { return indices.size(); }
};

/// Draws i.i.d. points with probability proportional to their weights.
/// Zero-weight points are never drawn.
class ImportanceSampler {
 public:
  explicit ImportanceSampler(const WeightedDataset& data);

  std::size_t draw_index(Rng& rng) const;
  SampleBatch draw(std::size_t k, Rng& rng) const;

 private:
  const WeightedDataset* data_;
  std::vector<double> cumulative_;
};

SampleBatch importance_sample(const WeightedDataset& data, std::size_t k, std::uint64_t seed);

struct ParityDataset {
  WeightedDataset data;
  std::vector<int> hidden;    // zero-based parity coordinates, ascending
  std::vector<bool> flipped;  // whether noise flipped each label
};

/// Points are uniform in {-1,1}^d with a constant 1 appended, divided by
/// sqrt(d+1) so that ||x||_2 = 1. Labels are the parity of `p` hidden
/// coordinates, each flipped independently with probability `noise_rate`.
ParityDataset parity_dataset(int d, int p, std::size_t n, double noise_rate, std::uint64_t seed);

struct PlantedHalfspace {
  WeightedDataset data;
  LinearModel separator;  // ||w*||_p = 1
};

/// Points in the unit l_q ball labelled by a random unit-l_p separator and
/// kept only when y <w*, x> >= margin.
PlantedHalfspace planted_halfspace(int d, std::size_t n, double margin, double p_exponent,
                                   std::uint64_t seed);

struct PlantedNetwork {
  WeightedDataset data;
  NeuralNetwork separator;
};

/// Same construction with a random network from the class as the separator.
PlantedNetwork planted_network(const NetworkClassSpec& spec, int d, std::size_t n, double margin,
                               std::uint64_t seed, int width = 3);

/// Negates each label independently with probability eta in [0, 1/2).
WeightedDataset flip_labels(const WeightedDataset& data, double eta, std::uint64_t seed);

/// Rejection attempts allowed per point before a planted generator gives up.
inline constexpr int kMaxRejectionAttempts = 10000;

/// CSV with header x_1..x_d,y,weight.
void write_dataset_csv(std::ostream& out, const WeightedDataset& data);
WeightedDataset read_dataset_csv(std::istream& in, double q = 2.0, bool norm_bounded = true);

}  // namespace ncerm
