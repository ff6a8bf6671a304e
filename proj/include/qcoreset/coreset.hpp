/**
 * This code is part of qcoreset.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcoreset/clustering.hpp"
#include "qcoreset/data.hpp"
#include "qcoreset/rng.hpp"

namespace qcoreset {

// Thrown when every point sits on a bicriteria center, so sensitivities
// carry no information.
class DegenerateDataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// m weighted points drawn from a Dataset. Draws are i.i.d. with replacement,
// so a source index may repeat.
struct Coreset {
  Eigen::MatrixXd points;                   // m x d, copies of dataset rows
  std::vector<double> weights;              // > 0
  std::vector<double> probs;                // selection probability of each draw, in (0, 1]
  std::vector<std::size_t> source_indices;  // row in the originating Dataset

  std::size_t size() const noexcept { return weights.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(points.cols()); }
};

// Checks the structural invariants (m >= 2, positive weights, probabilities in
// (0,1], and each point equal to its source row). Throws std::logic_error.
void validate(const Coreset& c, const Dataset& ds);

struct OneshotParams {
  double delta;      // grid ratio is (1 + delta)
  double p_max = 2;  // clamp ceiling relative to the smallest positive sensitivity

  // delta = 1 / ln(n), p_max = 2
  static OneshotParams defaults_for(std::size_t n) {
    return OneshotParams{1.0 / std::log(static_cast<double>(n)), 2.0};
  }
};

// Per-point selection distribution before sampling.
struct SamplingDistribution {
  std::vector<double> sensitivity;
  std::vector<double> prob;  // sensitivity / sum(sensitivity)
};

// BFL16 sensitivity with bicriteria solution B (nearest-center clusters B_i):
//   s(x) = d(x,B)^2 / c + sum_{x' in B_i} d(x',B)^2 / (|B_i| c) + n / |B_i|
// where c = mean_x d(x,B)^2.
SamplingDistribution bfl16_distribution(const Dataset& ds, const Centroids& b);

// ONESHOT raw sensitivity S(x) = d(x,CC)^2 / |cluster(x)| / (2n), lifted to
// at least S_min (the smallest positive raw value), rounded up onto the grid
// S_min * {1, (1+delta), (1+delta)^2, ...} and capped at p_max * S_min.
SamplingDistribution oneshot_distribution(const Dataset& ds, const Centroids& cc,
                                          const OneshotParams& params);

// Raw (unclamped) ONESHOT sensitivities.
std::vector<double> oneshot_raw_sensitivity(const Dataset& ds, const Centroids& cc);

// weight = 1 / (m p(x))
Coreset bfl16(const Dataset& ds, const Centroids& b, std::size_t m, Rng& rng);

// weight = 1 / (n m P(x))
Coreset oneshot(const Dataset& ds, const Centroids& cc, std::size_t m, const OneshotParams& params,
                Rng& rng);

enum class CoresetAlgorithm { bfl16, oneshot };

CoresetAlgorithm parse_coreset_algorithm(const std::string& s);
std::string to_string(CoresetAlgorithm a);

// Number of k-means++ centers used as the bicriteria solution.
inline constexpr std::size_t kBicriteriaCenters = 40;

// D^2-seeds min(kBicriteriaCenters, n) centers, then builds the coreset.
Coreset make_coreset(const Dataset& ds, CoresetAlgorithm algo, std::size_t m, Rng& rng);

// Exact weighted 2-means of a small coreset.
struct CoresetPartition {
  Centroids centroids;     // row 0 = side containing element 0
  std::vector<int> bits;   // bits[0] == 0
  double cost = 0.0;       // sum_i w_i |x_i - mu_side(i)|^2
};

inline constexpr std::size_t kMaxEnumerationSize = 20;

// Enumerates every bipartition with element 0 on side 0 and both sides
// non-empty, returning the one of minimum weighted 2-means cost
// (lexicographically smallest bits on ties). Requires 2 <= m <= 20.
CoresetPartition classical_coreset_2means(const Coreset& c);

// Weighted 2-means cost of a given bipartition; +inf if a side is empty.
double partition_cost(const Coreset& c, const std::vector<int>& bits);

// index,weight,prob,x0..x{d-1}
void write_coreset_csv(const Coreset& c, const std::filesystem::path& path);

}  // namespace qcoreset
