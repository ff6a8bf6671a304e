/**
 * This code is part of qcoreset.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "doctest.h"

#include "qcoreset/clustering.hpp"
#include "qcoreset/data.hpp"

using namespace qcoreset;

namespace {

Dataset line(std::initializer_list<double> xs) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return Dataset(m);
}

Centroids centers(std::initializer_list<std::initializer_list<double>> rows) {
  Centroids c;
  c.centers.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) c.centers(i, j++) = v;
    ++i;
  }
  return c;
}

// Plain 2-means: random distinct starting points, iterate until labels settle.
double oracle_two_means(const Eigen::MatrixXd& x, Rng& rng) {
  const auto n = x.rows();
  Eigen::Index a = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::size_t>(n)));
  Eigen::Index b = a;
  while (b == a) b = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::size_t>(n)));
  Eigen::RowVectorXd mu[2] = {x.row(a), x.row(b)};
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < 1000; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int l = (x.row(i) - mu[0]).squaredNorm() <= (x.row(i) - mu[1]).squaredNorm() ? 0 : 1;
      if (l != labels[static_cast<std::size_t>(i)]) changed = true;
      labels[static_cast<std::size_t>(i)] = l;
    }
    if (!changed) break;
    for (int k = 0; k < 2; ++k) {
      Eigen::RowVectorXd s = Eigen::RowVectorXd::Zero(x.cols());
      int cnt = 0;
      for (Eigen::Index i = 0; i < n; ++i)
        if (labels[static_cast<std::size_t>(i)] == k) {
          s += x.row(i);
          ++cnt;
        }
      if (cnt > 0) mu[k] = s / cnt;
    }
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    total += std::min((x.row(i) - mu[0]).squaredNorm(), (x.row(i) - mu[1]).squaredNorm());
  return total;
}

}  // namespace

TEST_CASE("d2_init returns the points themselves when exactly k are distinct") {
  Eigen::MatrixXd m(5, 2);
  m << 0, 0, 1, 1, 0, 0, 2, 2, 1, 1;
  Rng rng(1);
  const auto c = d2_init(Dataset(m), 3, rng);
  std::set<std::pair<double, double>> got;
  for (Eigen::Index i = 0; i < 3; ++i) got.insert({c.centers(i, 0), c.centers(i, 1)});
  CHECK(got == std::set<std::pair<double, double>>{{0, 0}, {1, 1}, {2, 2}});
  CHECK_THROWS_AS(d2_init(Dataset(m), 4, rng), std::invalid_argument);
}

TEST_CASE("d2_extend picks the only point with positive weight") {
  Eigen::MatrixXd m(6, 2);
  m << 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 100, 100;
  Rng rng(2);
  for (int t = 0; t < 50; ++t) CHECK(d2_extend(m, {0}, 2, rng) == std::vector<std::size_t>{0, 5});
}

TEST_CASE("d2_extend draws proportionally to squared distance") {
  const auto ds = line({0, 1, 2, 10});
  Rng rng(3);
  const int trials = 20000;
  int far = 0;
  for (int t = 0; t < trials; ++t)
    if (d2_extend(ds.points(), {0}, 2, rng)[1] == 3) ++far;
  const double p = 100.0 / 105.0;
  const double sigma = std::sqrt(p * (1 - p) / trials);
  CHECK(std::abs(far / static_cast<double>(trials) - p) < 4 * sigma);
}

TEST_CASE("d2_init centers are members of the dataset") {
  const auto ds = synth_blobs({4, 60, 3, 2, 10.0, 1.0});
  Rng rng(4);
  const auto c = d2_init(ds, 10, rng);
  for (Eigen::Index k = 0; k < c.centers.rows(); ++k) {
    bool member = false;
    for (std::size_t i = 0; i < ds.size(); ++i) member |= (ds.row(i) == c.centers.row(k));
    CHECK(member);
  }
}

TEST_CASE("lloyd with k = 1 converges to the mean in one step") {
  Eigen::MatrixXd m(3, 2);
  m << 0, 0, 2, 4, 4, 2;
  const auto r = lloyd(Dataset(m), centers({{10, 10}}));
  CHECK(r.centroids.centers(0, 0) == doctest::Approx(2.0));
  CHECK(r.centroids.centers(0, 1) == doctest::Approx(2.0));
  CHECK(r.iterations <= 2);
}

TEST_CASE("lloyd keeps a symmetric fixed point") {
  Eigen::MatrixXd m(4, 2);
  m << 0, 0, 0, 1, 10, 0, 10, 1;
  const auto r = lloyd(Dataset(m), centers({{0, 0.5}, {10, 0.5}}));
  CHECK(r.centroids.centers == centers({{0, 0.5}, {10, 0.5}}).centers);
  CHECK(r.assignment.labels == std::vector<int>{0, 0, 1, 1});
}

TEST_CASE("lloyd matches an independent restart oracle on two blobs") {
  const auto ds = synth_blobs({21, 50, 2, 2, 6.0, 1.0});
  Rng rng(5);
  const auto r = lloyd_best_of(ds, 2, 10, rng);
  Rng orng(6);
  double best = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 100; ++t) best = std::min(best, oracle_two_means(ds.points(), orng));
  CHECK(std::abs(r.cost - best) < 1e-9);
}

TEST_CASE("lloyd cost is non-increasing and empty clusters are repaired") {
  const auto ds = synth_blobs({8, 80, 3, 2, 3.0, 1.5});
  Rng rng(7);
  const auto r = lloyd(ds, d2_init(ds, 4, rng));
  for (std::size_t i = 1; i < r.cost_history.size(); ++i)
    if (!r.repaired[i - 1]) CHECK(r.cost_history[i] <= r.cost_history[i - 1] + 1e-9);

  // a center far from everything owns no points and gets reseeded
  const auto c = centers({{0, 0, 0}, {1e6, 1e6, 1e6}});
  const auto rr = lloyd(ds, c);
  CHECK(std::count(rr.repaired.begin(), rr.repaired.end(), true) >= 1);
  std::set<int> used(rr.assignment.labels.begin(), rr.assignment.labels.end());
  CHECK(used.size() == 2);
}

TEST_CASE("assign, cost and labelled_cost") {
  SUBCASE("point equal to a center") {
    Eigen::MatrixXd p(1, 1);
    p << 5;
    CHECK(assign(p, centers({{0}, {5}})).labels == std::vector<int>{1});
  }
  SUBCASE("ties go to the lowest index") {
    Eigen::MatrixXd p(1, 1);
    p << 1;
    CHECK(assign(p, centers({{0}, {2}})).labels == std::vector<int>{0});
  }
  SUBCASE("hand distance table") {
    const auto ds = line({0, 1, 5});
    CHECK(assign(ds, centers({{0}, {4}})).labels == std::vector<int>{0, 0, 1});
  }
  SUBCASE("cost examples") {
    CHECK(cost(line({1, 4}), centers({{1}, {4}})) == 0.0);
    Eigen::MatrixXd one(1, 2);
    one << 3, 4;
    CHECK(cost(one, centers({{0, 0}})) == 25.0);
    CHECK(cost(line({0, 2}), centers({{1}})) == 2.0);
  }
  SUBCASE("labelled cost equals cost after assign") {
    const auto ds = synth_blobs({3, 30, 4, 2, 5.0, 2.0});
    Rng rng(9);
    const auto c = d2_init(ds, 3, rng);
    CHECK(labelled_cost(ds.points(), assign(ds, c), c) == cost(ds, c));
  }
  SUBCASE("weighted cost") {
    const std::vector<double> w{2.0, 0.5};
    CHECK(weighted_cost(line({0, 2}).points(), w, centers({{1}})) == 2.5);
  }
}

TEST_CASE("accuracy") {
  const Assignment a{{0, 0, 1, 1}};
  CHECK(accuracy(a, a) == 1.0);
  CHECK(accuracy(a, Assignment{{1, 1, 0, 0}}) == 1.0);
  CHECK(accuracy(a, Assignment{{0, 1, 1, 1}}) == 0.75);
  CHECK_THROWS(accuracy(a, Assignment{{0, 1}}));
  CHECK_THROWS(accuracy(a, Assignment{{0, 1, 2, 1}}));

  Rng rng(10);
  for (int t = 0; t < 50; ++t) {
    Assignment x, y;
    for (int i = 0; i < 17; ++i) {
      x.labels.push_back(bernoulli(rng, 0.5));
      y.labels.push_back(bernoulli(rng, 0.5));
    }
    Assignment xf = x;
    for (auto& l : xf.labels) l = 1 - l;
    const double v = accuracy(x, y);
    CHECK(v == accuracy(y, x));
    CHECK(v == accuracy(xf, y));
    CHECK(v >= 0.5);
  }
}
