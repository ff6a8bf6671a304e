/**
 * This code is part of qcoreset.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qcoreset/coreset.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>

namespace qcoreset {

namespace {

struct Clusters {
  Eigen::VectorXd sq_dist;        // to nearest center
  std::vector<int> label;         // nearest center
  std::vector<std::size_t> size;  // points per center
};

Clusters cluster_against(const Dataset& ds, const Centroids& c) {
  Clusters out;
  out.sq_dist = nearest_sq_dist(ds.points(), c);
  out.label = assign(ds.points(), c).labels;
  out.size.assign(c.k(), 0);
  for (int l : out.label) ++out.size[static_cast<std::size_t>(l)];
  return out;
}

std::vector<double> normalized(const std::vector<double>& s) {
  const double total = std::accumulate(s.begin(), s.end(), 0.0);
  std::vector<double> p(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) p[i] = s[i] / total;
  return p;
}

Coreset draw(const Dataset& ds, const std::vector<double>& prob, std::size_t m, double weight_scale,
             Rng& rng) {
  if (m < 2) throw std::invalid_argument("coreset: size must be >= 2");
  if (m > ds.size()) throw std::invalid_argument("coreset: size exceeds dataset size");
  std::vector<double> cumulative(prob.size());
  std::partial_sum(prob.begin(), prob.end(), cumulative.begin());

  Coreset c;
  c.points.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(ds.dim()));
  for (std::size_t i = 0; i < m; ++i) {
    const auto idx = draw_from_cumulative(rng, cumulative);
    c.points.row(static_cast<Eigen::Index>(i)) = ds.row(idx);
    c.source_indices.push_back(idx);
    c.probs.push_back(prob[idx]);
    c.weights.push_back(1.0 / (weight_scale * static_cast<double>(m) * prob[idx]));
  }
  return c;
}

}  // namespace

void validate(const Coreset& c, const Dataset& ds) {
  const auto m = c.size();
  if (m < 2) throw std::logic_error("coreset: fewer than 2 points");
  if (c.probs.size() != m || c.source_indices.size() != m || static_cast<std::size_t>(c.points.rows()) != m)
    throw std::logic_error("coreset: inconsistent field lengths");
  for (std::size_t i = 0; i < m; ++i) {
    if (!(c.weights[i] > 0.0)) throw std::logic_error("coreset: non-positive weight");
    if (!(c.probs[i] > 0.0 && c.probs[i] <= 1.0)) throw std::logic_error("coreset: probability outside (0,1]");
    if (c.source_indices[i] >= ds.size()) throw std::logic_error("coreset: source index out of range");
    if (c.points.row(static_cast<Eigen::Index>(i)) != ds.row(c.source_indices[i]))
      throw std::logic_error("coreset: point differs from its source row");
  }
}

SamplingDistribution bfl16_distribution(const Dataset& ds, const Centroids& b) {
  const auto cl = cluster_against(ds, b);
  const auto n = ds.size();
  const double c_phi = cl.sq_dist.sum() / static_cast<double>(n);
  if (!(c_phi > 0.0))
    throw DegenerateDataError("bfl16: every point coincides with a bicriteria center");

  std::vector<double> cluster_sum(b.k(), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    cluster_sum[static_cast<std::size_t>(cl.label[i])] += cl.sq_dist[static_cast<Eigen::Index>(i)];

  SamplingDistribution out;
  out.sensitivity.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = static_cast<std::size_t>(cl.label[i]);
    const double size = static_cast<double>(cl.size[j]);
    out.sensitivity[i] = cl.sq_dist[static_cast<Eigen::Index>(i)] / c_phi +
                         cluster_sum[j] / (size * c_phi) + static_cast<double>(n) / size;
  }
  out.prob = normalized(out.sensitivity);
  return out;
}

std::vector<double> oneshot_raw_sensitivity(const Dataset& ds, const Centroids& cc) {
  const auto cl = cluster_against(ds, cc);
  const auto n = ds.size();
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double size = static_cast<double>(cl.size[static_cast<std::size_t>(cl.label[i])]);
    s[i] = cl.sq_dist[static_cast<Eigen::Index>(i)] / size / (2.0 * static_cast<double>(n));
  }
  return s;
}

SamplingDistribution oneshot_distribution(const Dataset& ds, const Centroids& cc,
                                          const OneshotParams& params) {
  if (!(params.delta > 0.0)) throw std::invalid_argument("oneshot: delta must be positive");
  if (!(params.p_max >= 1.0)) throw std::invalid_argument("oneshot: p_max must be >= 1");

  auto raw = oneshot_raw_sensitivity(ds, cc);
  double s_min = std::numeric_limits<double>::infinity();
  for (double s : raw)
    if (s > 0.0) s_min = std::min(s_min, s);
  if (!std::isfinite(s_min))
    throw DegenerateDataError("oneshot: every point coincides with a center");

  const double log_ratio = std::log1p(params.delta);
  const double cap = params.p_max * s_min;
  SamplingDistribution out;
  out.sensitivity.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double lifted = std::max(raw[i], s_min);
    // smallest grid level >= lifted; the small slack keeps exact grid hits in place
    const double steps = std::ceil(std::log(lifted / s_min) / log_ratio - 1e-9);
    const double level = s_min * std::exp(std::max(0.0, steps) * log_ratio);
    out.sensitivity[i] = std::min(level, cap);
  }
  out.prob = normalized(out.sensitivity);
  return out;
}

Coreset bfl16(const Dataset& ds, const Centroids& b, std::size_t m, Rng& rng) {
  const auto dist = bfl16_distribution(ds, b);
  return draw(ds, dist.prob, m, 1.0, rng);
}

Coreset oneshot(const Dataset& ds, const Centroids& cc, std::size_t m, const OneshotParams& params,
                Rng& rng) {
  const auto dist = oneshot_distribution(ds, cc, params);
  return draw(ds, dist.prob, m, static_cast<double>(ds.size()), rng);
}

CoresetAlgorithm parse_coreset_algorithm(const std::string& s) {
  if (s == "bfl16") return CoresetAlgorithm::bfl16;
  if (s == "oneshot") return CoresetAlgorithm::oneshot;
  throw std::invalid_argument("unknown coreset algorithm: " + s);
}

std::string to_string(CoresetAlgorithm a) {
  return a == CoresetAlgorithm::bfl16 ? "bfl16" : "oneshot";
}

Coreset make_coreset(const Dataset& ds, CoresetAlgorithm algo, std::size_t m, Rng& rng) {
  const auto centers = d2_init(ds, std::min(kBicriteriaCenters, ds.size()), rng);
  if (algo == CoresetAlgorithm::bfl16) return bfl16(ds, centers, m, rng);
  return oneshot(ds, centers, m, OneshotParams::defaults_for(ds.size()), rng);
}

double partition_cost(const Coreset& c, const std::vector<int>& bits) {
  if (bits.size() != c.size()) throw std::invalid_argument("partition_cost: length mismatch");
  double total = 0.0;
  for (int side = 0; side < 2; ++side) {
    double w = 0.0;
    Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(c.points.cols());
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (bits[i] != side) continue;
      w += c.weights[i];
      mu += c.weights[i] * c.points.row(static_cast<Eigen::Index>(i));
    }
    if (w == 0.0) return std::numeric_limits<double>::infinity();
    mu /= w;
    for (std::size_t i = 0; i < c.size(); ++i)
      if (bits[i] == side) total += c.weights[i] * (c.points.row(static_cast<Eigen::Index>(i)) - mu).squaredNorm();
  }
  return total;
}

CoresetPartition classical_coreset_2means(const Coreset& c) {
  const auto m = c.size();
  if (m < 2) throw std::invalid_argument("classical_coreset_2means: need m >= 2");
  if (m > kMaxEnumerationSize)
    throw std::invalid_argument("classical_coreset_2means: m exceeds enumeration cap of 20");

  // Counting `code` upward with bits[1] as its most significant bit walks the
  // bit strings in lexicographic order.
  CoresetPartition best;
  best.cost = std::numeric_limits<double>::infinity();
  std::vector<int> bits(m, 0);
  const std::uint64_t total = std::uint64_t{1} << (m - 1);
  for (std::uint64_t code = 1; code < total; ++code) {
    for (std::size_t i = 1; i < m; ++i) bits[i] = static_cast<int>((code >> (m - 1 - i)) & 1u);
    const double v = partition_cost(c, bits);
    if (v < best.cost) {
      best.cost = v;
      best.bits = bits;
    }
  }

  best.centroids.centers = Eigen::MatrixXd::Zero(2, c.points.cols());
  std::array<double, 2> w{0.0, 0.0};
  for (std::size_t i = 0; i < m; ++i) {
    const int side = best.bits[i];
    w[static_cast<std::size_t>(side)] += c.weights[i];
    best.centroids.centers.row(side) += c.weights[i] * c.points.row(static_cast<Eigen::Index>(i));
  }
  best.centroids.centers.row(0) /= w[0];
  best.centroids.centers.row(1) /= w[1];
  return best;
}

void write_coreset_csv(const Coreset& c, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "index,weight,prob";
  for (std::size_t j = 0; j < c.dim(); ++j) out << ",x" << j;
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < c.size(); ++i) {
    out << c.source_indices[i] << ',' << c.weights[i] << ',' << c.probs[i];
    for (std::size_t j = 0; j < c.dim(); ++j)
      out << ',' << c.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace qcoreset
