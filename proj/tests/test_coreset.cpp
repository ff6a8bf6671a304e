/**
 * This code is part of qcoreset.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "test_util.hpp"

#include "qcoreset/clustering.hpp"
#include "qcoreset/coreset.hpp"
#include "qcoreset/data.hpp"

using namespace qcoreset;
using qcoreset::testing::gaussian_coreset;
using qcoreset::testing::TempFile;

namespace {

Dataset line(std::initializer_list<double> xs) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return Dataset(m);
}

Centroids line_centers(std::initializer_list<double> xs) {
  Centroids c;
  c.centers.resize(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) c.centers(i++, 0) = x;
  return c;
}

// Exhaustive weighted 2-means over all 2^m labelings, kept independent of the
// library enumeration order: returns the minimum cost only.
double oracle_min_partition_cost(const Coreset& c) {
  const auto m = c.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << m); ++mask) {
    double total = 0.0;
    for (int side = 0; side < 2; ++side) {
      Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(c.points.cols());
      double w = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        if (static_cast<int>((mask >> i) & 1u) == side) {
          mu += c.weights[i] * c.points.row(static_cast<Eigen::Index>(i));
          w += c.weights[i];
        }
      mu /= w;
      for (std::size_t i = 0; i < m; ++i)
        if (static_cast<int>((mask >> i) & 1u) == side)
          total += c.weights[i] * (c.points.row(static_cast<Eigen::Index>(i)) - mu).squaredNorm();
    }
    best = std::min(best, total);
  }
  return best;
}

}  // namespace

TEST_CASE("bfl16 distribution on the hand-computed 4-point instance") {
  // d^2 = {0,1,0,1}, c_phi = 0.5, cluster sums 1, |B_i| = 2:
  // s = {0 + 1 + 2, 2 + 1 + 2, 3, 5} = {3, 5, 3, 5}, sum 16
  const auto ds = line({0, 1, 4, 5});
  const auto dist = bfl16_distribution(ds, line_centers({0, 4}));
  const std::vector<double> s{3, 5, 3, 5};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(dist.sensitivity[i] == doctest::Approx(s[i]).epsilon(1e-14));
    CHECK(dist.prob[i] == doctest::Approx(s[i] / 16.0).epsilon(1e-14));
  }

  Rng rng(1);
  std::vector<double> freq(4, 0.0);
  const int reps = 25000;  // 4 draws each, 1e5 in total
  for (int r = 0; r < reps; ++r)
    for (auto idx : bfl16(ds, line_centers({0, 4}), 4, rng).source_indices) freq[idx] += 1.0;
  const double total = 4.0 * reps;
  for (std::size_t i = 0; i < 4; ++i) {
    const double p = s[i] / 16.0;
    CHECK(std::abs(freq[i] / total - p) < 3.0 * std::sqrt(p * (1 - p) / total));
  }
}

TEST_CASE("bfl16 rejects data that coincides with its centers") {
  CHECK_THROWS_AS(bfl16_distribution(line({0, 0, 4, 4}), line_centers({0, 4})), DegenerateDataError);
}

TEST_CASE("symmetric data gives uniform probabilities") {
  const auto ds = line({0, 1, 4, 5});
  const auto cc = line_centers({0.5, 4.5});
  Rng rng(2);
  const auto b = bfl16(ds, cc, 3, rng);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(b.probs[i] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(b.weights[i] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  }
  const auto o = oneshot(ds, cc, 3, OneshotParams::defaults_for(4), rng);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(o.probs[i] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(o.weights[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  }
}

TEST_CASE("oneshot distribution on the hand-computed 6-point instance") {
  const auto ds = line({0, 1, 2, 10, 10.1, 10.2});
  const auto cc = line_centers({1, 10.1});
  const auto params = OneshotParams::defaults_for(6);
  CHECK(params.delta == doctest::Approx(1.0 / std::log(6.0)));
  CHECK(params.p_max == 2.0);

  // raw S = d^2 / |cluster| / (2n) with both clusters of size 3
  const double n = 6.0;
  const std::vector<double> raw{1.0 / 3 / (2 * n), 0.0, 1.0 / 3 / (2 * n),
                                (10.0 - 10.1) * (10.0 - 10.1) / 3 / (2 * n), 0.0,
                                (10.2 - 10.1) * (10.2 - 10.1) / 3 / (2 * n)};
  const auto got_raw = oneshot_raw_sensitivity(ds, cc);
  for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(got_raw[i] - raw[i]) < 1e-12);

  // S_min is the right cluster's value; the left cluster (ratio ~100) is
  // capped at 2 S_min, zeros are lifted to S_min, ratio ~1 stays at S_min
  const double s_min = std::min(raw[3], raw[5]);
  const std::vector<double> clamped{2 * s_min, s_min, 2 * s_min, s_min, s_min, s_min};
  const auto dist = oneshot_distribution(ds, cc, params);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(std::abs(dist.sensitivity[i] - clamped[i]) < 1e-12);
    CHECK(std::abs(dist.prob[i] - clamped[i] / (8 * s_min)) < 1e-12);
  }
}

TEST_CASE("oneshot rounds up onto the geometric grid") {
  // raw values at ratios 1, 1.2, 1.6 to S_min with delta = 0.25: grid 1, 1.25, 1.5625, 1.953125
  const auto ds = line({0, 1, std::sqrt(1.2), std::sqrt(1.6), 100, 101});
  const auto cc = line_centers({0, 100});
  const OneshotParams params{0.25, 3.0};
  const auto raw = oneshot_raw_sensitivity(ds, cc);
  const double s_min = raw[1];
  const auto dist = oneshot_distribution(ds, cc, params);
  CHECK(dist.sensitivity[1] == doctest::Approx(s_min));
  CHECK(dist.sensitivity[2] == doctest::Approx(1.25 * s_min));
  CHECK(dist.sensitivity[3] == doctest::Approx(1.953125 * s_min));
  for (double s : dist.sensitivity) {
    CHECK(s >= s_min * (1 - 1e-12));
    CHECK(s <= params.p_max * s_min * (1 + 1e-12));
  }
  CHECK_THROWS_AS(oneshot_distribution(line({0, 0, 5, 5}), line_centers({0, 5}), params), DegenerateDataError);
  CHECK_THROWS(oneshot_distribution(ds, cc, OneshotParams{0.0, 2.0}));
  CHECK_THROWS(oneshot_distribution(ds, cc, OneshotParams{0.1, 0.5}));
}

TEST_CASE("coreset weight identities and structure") {
  const auto ds = synth_blobs({3, 120, 3, 2, 8.0, 2.0});
  for (std::size_t m : {2u, 5u, 10u}) {
    Rng rng(m);
    const auto b = make_coreset(ds, CoresetAlgorithm::bfl16, m, rng);
    validate(b, ds);
    for (std::size_t i = 0; i < m; ++i)
      CHECK(b.weights[i] * b.probs[i] * static_cast<double>(m) == doctest::Approx(1.0).epsilon(1e-14));
    const auto o = make_coreset(ds, CoresetAlgorithm::oneshot, m, rng);
    validate(o, ds);
    for (std::size_t i = 0; i < m; ++i)
      CHECK(o.weights[i] * o.probs[i] * static_cast<double>(m) * 120.0 == doctest::Approx(1.0).epsilon(1e-14));
  }
  Rng rng(1);
  CHECK_THROWS(make_coreset(ds, CoresetAlgorithm::bfl16, 1, rng));
  CHECK_THROWS(make_coreset(ds, CoresetAlgorithm::bfl16, 121, rng));
}

TEST_CASE("coreset sampling is reproducible for a fixed seed") {
  const auto ds = synth_blobs({4, 80, 2, 2, 8.0, 2.0});
  for (auto algo : {CoresetAlgorithm::bfl16, CoresetAlgorithm::oneshot}) {
    Rng a(99), b(99);
    const auto ca = make_coreset(ds, algo, 7, a);
    const auto cb = make_coreset(ds, algo, 7, b);
    CHECK(ca.source_indices == cb.source_indices);
    CHECK(ca.weights == cb.weights);
  }
}

TEST_CASE("sensitivity sampling is unbiased for a fixed center set") {
  const auto ds = synth_blobs({5, 50, 2, 2, 5.0, 2.0});
  Rng rng(17);
  const auto b = d2_init(ds, kBicriteriaCenters, rng);
  Centroids q;
  q.centers.resize(2, 2);
  q.centers << 1.0, -1.0, -2.0, 3.0;
  const double truth = cost(ds, q);

  auto estimates = [&](auto&& draw) {
    std::vector<double> v;
    for (int r = 0; r < 2000; ++r) {
      const Coreset c = draw();
      v.push_back(weighted_cost(c.points, c.weights, q));
    }
    return v;
  };
  auto mean_and_se = [](const std::vector<double>& v) {
    double mu = 0.0;
    for (double x : v) mu += x;
    mu /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mu) * (x - mu);
    return std::pair{mu, std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()))};
  };

  const auto [mb, seb] = mean_and_se(estimates([&] { return bfl16(ds, b, 10, rng); }));
  CHECK(std::abs(mb - truth) < 4.0 * seb);

  // ONESHOT weights estimate cost / n
  const auto params = OneshotParams::defaults_for(ds.size());
  const auto [mo, seo] = mean_and_se(estimates([&] { return oneshot(ds, b, 10, params, rng); }));
  CHECK(std::abs(mo * static_cast<double>(ds.size()) - truth) / truth < 0.10);
}

TEST_CASE("coreset algorithm names") {
  CHECK(parse_coreset_algorithm("bfl16") == CoresetAlgorithm::bfl16);
  CHECK(to_string(CoresetAlgorithm::oneshot) == "oneshot");
  CHECK_THROWS(parse_coreset_algorithm("kmeans"));
}

TEST_CASE("classical_coreset_2means") {
  SUBCASE("m = 2 separates the two points") {
    Rng rng(1);
    const auto c = gaussian_coreset(2, 3, rng);
    const auto p = classical_coreset_2means(c);
    CHECK(p.bits == std::vector<int>{0, 1});
    CHECK(p.centroids.centers.row(0) == c.points.row(0));
    CHECK(p.centroids.centers.row(1) == c.points.row(1));
    CHECK(p.cost == 0.0);
  }
  SUBCASE("two far pairs") {
    Coreset c;
    c.points.resize(4, 2);
    c.points << 0, 0, 100, 0, 0, 1, 100, 1;
    c.weights = {1, 1, 1, 1};
    c.probs = {1, 1, 1, 1};
    c.source_indices = {0, 1, 2, 3};
    const auto p = classical_coreset_2means(c);
    CHECK(p.bits == std::vector<int>{0, 1, 0, 1});
    CHECK(p.centroids.centers(0, 0) == 0.0);
    CHECK(p.centroids.centers(0, 1) == 0.5);
    CHECK(p.centroids.centers(1, 0) == 100.0);
    CHECK(p.centroids.centers(1, 1) == 0.5);
  }
  SUBCASE("random weighted m = 6 matches an independent enumeration") {
    Rng rng(7);
    for (int t = 0; t < 20; ++t) {
      std::vector<double> w;
      for (int i = 0; i < 6; ++i) w.push_back(0.2 + 3.0 * uniform01(rng));
      const auto c = gaussian_coreset(6, 3, rng, w);
      const auto p = classical_coreset_2means(c);
      CHECK(p.bits[0] == 0);
      CHECK(p.cost == doctest::Approx(oracle_min_partition_cost(c)).epsilon(1e-12));
      CHECK(partition_cost(c, p.bits) == doctest::Approx(p.cost).epsilon(1e-12));
    }
  }
  SUBCASE("errors and degenerate partitions") {
    Rng rng(3);
    CHECK_THROWS(classical_coreset_2means(gaussian_coreset(21, 1, rng)));
    const auto c = gaussian_coreset(3, 1, rng);
    CHECK(std::isinf(partition_cost(c, {0, 0, 0})));
    CHECK_THROWS(partition_cost(c, {0, 1}));
  }
}

TEST_CASE("validate catches broken coresets") {
  const auto ds = synth_blobs({1, 60, 2, 2, 8.0, 1.0});
  Rng rng(4);
  auto c = make_coreset(ds, CoresetAlgorithm::bfl16, 4, rng);
  validate(c, ds);
  auto bad = c;
  bad.weights[0] = 0.0;
  CHECK_THROWS_AS(validate(bad, ds), std::logic_error);
  bad = c;
  bad.probs[1] = 1.5;
  CHECK_THROWS_AS(validate(bad, ds), std::logic_error);
  bad = c;
  bad.points(0, 0) += 1.0;
  CHECK_THROWS_AS(validate(bad, ds), std::logic_error);
}

TEST_CASE("write_coreset_csv layout") {
  Coreset c;
  c.points.resize(2, 2);
  c.points << 1.5, 2, 3, 4;
  c.weights = {0.5, 2};
  c.probs = {1, 0.25};
  c.source_indices = {7, 3};
  TempFile f;
  write_coreset_csv(c, f.path());
  std::istringstream in(f.read());
  std::string header;
  std::getline(in, header);
  CHECK(header == "index,weight,prob,x0,x1");
  std::string first;
  std::getline(in, first);
  CHECK(first == "7,0.5,1,1.5,2");
}
