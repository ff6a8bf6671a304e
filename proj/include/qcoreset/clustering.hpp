/**
 * This code is part of qcoreset.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qcoreset/data.hpp"
#include "qcoreset/rng.hpp"

namespace qcoreset {

// k centers of dimension d, one per row.
struct Centroids {
  Eigen::MatrixXd centers;

  std::size_t k() const noexcept { return static_cast<std::size_t>(centers.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(centers.cols()); }
};

// Cluster label per point, each in [0, k).
struct Assignment {
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  bool operator==(const Assignment&) const = default;
};

// Squared distance from each row of `points` to its nearest center.
Eigen::VectorXd nearest_sq_dist(const Eigen::MatrixXd& points, const Centroids& c);

// k-means++ seeding. The first center is uniform over points; each further
// center is drawn with probability proportional to the squared distance to
// the nearest chosen center. Throws std::invalid_argument when the data has
// fewer than k distinct points.
Centroids d2_init(const Dataset& ds, std::size_t k, Rng& rng);

// Same as d2_init but starting from an already chosen set of row indices.
// Returns the selected row indices (including `seeded`).
std::vector<std::size_t> d2_extend(const Eigen::MatrixXd& points, std::vector<std::size_t> seeded,
                                   std::size_t k, Rng& rng);

// Nearest center by squared Euclidean distance; ties go to the lowest index.
Assignment assign(const Eigen::MatrixXd& points, const Centroids& c);
inline Assignment assign(const Dataset& ds, const Centroids& c) { return assign(ds.points(), c); }

double cost(const Eigen::MatrixXd& points, const Centroids& c);
inline double cost(const Dataset& ds, const Centroids& c) { return cost(ds.points(), c); }

// sum_i w_i * min_q |x_i - q|^2
double weighted_cost(const Eigen::MatrixXd& points, std::span<const double> weights,
                     const Centroids& c);

// Cost of a fixed labelling against the given centers.
double labelled_cost(const Eigen::MatrixXd& points, const Assignment& a, const Centroids& c);

struct LloydOptions {
  std::size_t max_iter = 300;
  double tol = 1e-6;
};

struct LloydResult {
  Centroids centroids;
  Assignment assignment;
  double cost = 0.0;
  std::size_t iterations = 0;
  // Cost after each assignment step, and whether that iteration had to
  // reseed an empty cluster.
  std::vector<double> cost_history;
  std::vector<bool> repaired;
};

// Lloyd iteration from `init`. Stops once the largest center displacement is
// <= tol or max_iter iterations ran. An empty cluster is reseeded at the point
// farthest from its assigned center.
LloydResult lloyd(const Dataset& ds, const Centroids& init, const LloydOptions& opts = {});

// Best of `restarts` k-means++-seeded Lloyd runs by final cost (first wins ties).
LloydResult lloyd_best_of(const Dataset& ds, std::size_t k, std::size_t restarts, Rng& rng,
                          const LloydOptions& opts = {});

// Fraction of points on which two 2-cluster labellings agree, maximised over
// the two ways of matching labels. Throws on length mismatch or labels outside
// {0, 1}.
double accuracy(const Assignment& a, const Assignment& b);

}  // namespace qcoreset
