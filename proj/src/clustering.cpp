/**
 * This code is part of qcoreset.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qcoreset/clustering.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace qcoreset {

namespace {

void check_dims(const Eigen::MatrixXd& points, const Centroids& c) {
  if (c.k() == 0) throw std::invalid_argument("centroids: k must be >= 1");
  if (static_cast<Eigen::Index>(c.dim()) != points.cols())
    throw std::invalid_argument("centroids: dimension mismatch");
}

// (index of nearest center, squared distance), lowest index on ties
std::pair<int, double> nearest(const Eigen::MatrixXd& points, Eigen::Index i, const Centroids& c) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < c.centers.rows(); ++j) {
    const double dd = (points.row(i) - c.centers.row(j)).squaredNorm();
    if (dd < best_d) {
      best_d = dd;
      best = static_cast<int>(j);
    }
  }
  return {best, best_d};
}

}  // namespace

Eigen::VectorXd nearest_sq_dist(const Eigen::MatrixXd& points, const Centroids& c) {
  check_dims(points, c);
  Eigen::VectorXd out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) out[i] = nearest(points, i, c).second;
  return out;
}

std::vector<std::size_t> d2_extend(const Eigen::MatrixXd& points, std::vector<std::size_t> chosen,
                                   std::size_t k, Rng& rng) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (k > n) throw std::invalid_argument("d2_init: k exceeds number of points");
  if (chosen.empty() && k > 0) chosen.push_back(uniform_index(rng, n));

  Eigen::VectorXd dist = Eigen::VectorXd::Constant(points.rows(), std::numeric_limits<double>::infinity());
  auto absorb = [&](std::size_t idx) {
    for (Eigen::Index i = 0; i < points.rows(); ++i)
      dist[i] = std::min(dist[i], (points.row(i) - points.row(static_cast<Eigen::Index>(idx))).squaredNorm());
  };
  for (auto idx : chosen) absorb(idx);

  std::vector<double> cumulative(n);
  while (chosen.size() < k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += dist[static_cast<Eigen::Index>(i)];
      cumulative[i] = acc;
    }
    // every remaining point coincides with a chosen center
    if (!(acc > 0.0))
      throw std::invalid_argument("d2_init: fewer than k distinct points");
    const auto next = draw_from_cumulative(rng, cumulative);
    chosen.push_back(next);
    absorb(next);
  }
  return chosen;
}

Centroids d2_init(const Dataset& ds, std::size_t k, Rng& rng) {
  if (k == 0) throw std::invalid_argument("d2_init: k must be >= 1");
  const auto idx = d2_extend(ds.points(), {}, k, rng);
  Centroids c{Eigen::MatrixXd(static_cast<Eigen::Index>(k), ds.points().cols())};
  for (std::size_t j = 0; j < k; ++j)
    c.centers.row(static_cast<Eigen::Index>(j)) = ds.points().row(static_cast<Eigen::Index>(idx[j]));
  return c;
}

Assignment assign(const Eigen::MatrixXd& points, const Centroids& c) {
  check_dims(points, c);
  Assignment a;
  a.labels.resize(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    a.labels[static_cast<std::size_t>(i)] = nearest(points, i, c).first;
  return a;
}

double cost(const Eigen::MatrixXd& points, const Centroids& c) {
  check_dims(points, c);
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) total += nearest(points, i, c).second;
  return total;
}

double weighted_cost(const Eigen::MatrixXd& points, std::span<const double> weights,
                     const Centroids& c) {
  if (weights.size() != static_cast<std::size_t>(points.rows()))
    throw std::invalid_argument("weighted_cost: weight count mismatch");
  const Eigen::VectorXd d = nearest_sq_dist(points, c);
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) total += weights[i] * d[static_cast<Eigen::Index>(i)];
  return total;
}

double labelled_cost(const Eigen::MatrixXd& points, const Assignment& a, const Centroids& c) {
  check_dims(points, c);
  if (a.size() != static_cast<std::size_t>(points.rows()))
    throw std::invalid_argument("labelled_cost: assignment length mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    total += (points.row(i) - c.centers.row(a.labels[static_cast<std::size_t>(i)])).squaredNorm();
  return total;
}

LloydResult lloyd(const Dataset& ds, const Centroids& init, const LloydOptions& opts) {
  const auto& x = ds.points();
  check_dims(x, init);
  if (opts.max_iter < 1) throw std::invalid_argument("lloyd: max_iter must be >= 1");
  if (opts.tol < 0.0) throw std::invalid_argument("lloyd: tol must be >= 0");

  const Eigen::Index k = init.centers.rows();
  LloydResult r;
  r.centroids = init;
  std::vector<double> sq(static_cast<std::size_t>(x.rows()));
  r.assignment.labels.resize(static_cast<std::size_t>(x.rows()));

  for (std::size_t it = 0; it < opts.max_iter; ++it) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      auto [lab, d] = nearest(x, i, r.centroids);
      r.assignment.labels[static_cast<std::size_t>(i)] = lab;
      sq[static_cast<std::size_t>(i)] = d;
      total += d;
    }
    r.cost_history.push_back(total);

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const int lab = r.assignment.labels[static_cast<std::size_t>(i)];
      sums.row(lab) += x.row(i);
      ++counts[static_cast<std::size_t>(lab)];
    }

    bool repaired = false;
    std::vector<bool> used(static_cast<std::size_t>(x.rows()), false);
    Eigen::MatrixXd next(k, x.cols());
    for (Eigen::Index j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) {
        next.row(j) = sums.row(j) / static_cast<double>(counts[static_cast<std::size_t>(j)]);
        continue;
      }
      // farthest point from its own center, lowest index on ties
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < sq.size(); ++i) {
        if (!used[i] && sq[i] > far_d) {
          far_d = sq[i];
          far = i;
        }
      }
      used[far] = true;
      next.row(j) = x.row(static_cast<Eigen::Index>(far));
      repaired = true;
    }
    r.repaired.push_back(repaired);

    const double move = (next - r.centroids.centers).rowwise().norm().maxCoeff();
    r.centroids.centers = std::move(next);
    r.iterations = it + 1;
    if (move <= opts.tol && !repaired) break;
  }
  r.assignment = assign(x, r.centroids);
  r.cost = cost(x, r.centroids);
  return r;
}

LloydResult lloyd_best_of(const Dataset& ds, std::size_t k, std::size_t restarts, Rng& rng,
                          const LloydOptions& opts) {
  if (restarts < 1) throw std::invalid_argument("lloyd_best_of: restarts must be >= 1");
  LloydResult best;
  bool have = false;
  for (std::size_t r = 0; r < restarts; ++r) {
    auto run = lloyd(ds, d2_init(ds, k, rng), opts);
    if (!have || run.cost < best.cost) {
      best = std::move(run);
      have = true;
    }
  }
  return best;
}

double accuracy(const Assignment& a, const Assignment& b) {
  if (a.size() != b.size()) throw std::invalid_argument("accuracy: length mismatch");
  if (a.size() == 0) throw std::invalid_argument("accuracy: empty assignment");
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int x = a.labels[i];
    const int y = b.labels[i];
    if ((x != 0 && x != 1) || (y != 0 && y != 1))
      throw std::invalid_argument("accuracy: labels must be 0 or 1");
    if (x == y) ++same;
  }
  const auto n = a.size();
  return static_cast<double>(std::max(same, n - same)) / static_cast<double>(n);
}

}  // namespace qcoreset
