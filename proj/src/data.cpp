/**
 * This code is part of qcoreset.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qcoreset/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "qcoreset/rng.hpp"

namespace qcoreset {

Dataset::Dataset(Eigen::MatrixXd points, std::string name,
                 std::optional<std::vector<int>> true_labels)
    : points_(std::move(points)), name_(std::move(name)), labels_(std::move(true_labels)) {
  if (points_.rows() < 2)
    throw std::invalid_argument("Dataset: need at least 2 points");
  if (points_.cols() < 1)
    throw std::invalid_argument("Dataset: need at least 1 dimension");
  if (!points_.allFinite())
    throw std::invalid_argument("Dataset: non-finite entry");
  if (labels_ && labels_->size() != size())
    throw std::invalid_argument("Dataset: label count does not match point count");
}

Normalization parse_normalization(const std::string& s) {
  if (s == "none") return Normalization::none;
  if (s == "zscore") return Normalization::zscore;
  if (s == "minmax") return Normalization::minmax;
  throw std::invalid_argument("unknown normalization mode: " + s);
}

std::string to_string(Normalization mode) {
  switch (mode) {
    case Normalization::none: return "none";
    case Normalization::zscore: return "zscore";
    case Normalization::minmax: return "minmax";
  }
  return "none";
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  for (auto& c : cells) {
    auto b = c.find_first_not_of(" \t");
    auto e = c.find_last_not_of(" \t");
    c = (b == std::string::npos) ? std::string{} : c.substr(b, e - b + 1);
  }
  return cells;
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  std::vector<std::vector<double>> rows;
  std::vector<std::string> raw_labels;
  std::string line;
  bool header_pending = opts.has_header;
  std::size_t width = 0;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    ++row_no;
    auto cells = split_commas(line);
    if (width == 0) {
      width = cells.size();
      if (opts.label_column && *opts.label_column >= width)
        throw ParseError("label column out of range", row_no, *opts.label_column + 1);
    } else if (cells.size() != width) {
      throw ParseError("ragged row " + std::to_string(row_no) + ": expected " +
                           std::to_string(width) + " cells, got " + std::to_string(cells.size()),
                       row_no, cells.size());
    }
    std::vector<double> values;
    values.reserve(width);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (opts.label_column && c == *opts.label_column) {
        if (cells[c].empty())
          throw ParseError("missing label at row " + std::to_string(row_no), row_no, c + 1);
        raw_labels.push_back(cells[c]);
        continue;
      }
      auto v = parse_double(cells[c]);
      if (!v || !std::isfinite(*v))
        throw ParseError("non-numeric cell '" + cells[c] + "' at row " + std::to_string(row_no) +
                             ", column " + std::to_string(c + 1),
                         row_no, c + 1);
      values.push_back(*v);
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw std::runtime_error("no data rows in " + path.string());

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd points(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) points(i, j) = rows[i][j];

  std::optional<std::vector<int>> labels;
  if (opts.label_column) {
    std::vector<int> out;
    out.reserve(raw_labels.size());
    bool all_int = true;
    for (const auto& s : raw_labels) {
      int v = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || ptr != s.data() + s.size()) {
        all_int = false;
        break;
      }
      out.push_back(v);
    }
    if (!all_int) {
      out.clear();
      std::map<std::string, int> ids;
      for (const auto& s : raw_labels) {
        auto [it, inserted] = ids.emplace(s, static_cast<int>(ids.size()));
        out.push_back(it->second);
      }
    }
    labels = std::move(out);
  }
  return Dataset(std::move(points), path.stem().string(), std::move(labels));
}

void write_csv(const Dataset& ds, const std::filesystem::path& path, bool with_header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(17);
  if (with_header) {
    for (std::size_t j = 0; j < ds.dim(); ++j) out << (j ? "," : "") << 'x' << j;
    if (ds.true_labels()) out << ",label";
    out << '\n';
  }
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < ds.dim(); ++j)
      out << (j ? "," : "") << ds.points()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    if (ds.true_labels()) out << ',' << (*ds.true_labels())[i];
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Dataset normalize(const Dataset& ds, Normalization mode) {
  if (mode == Normalization::none) return ds;
  Eigen::MatrixXd x = ds.points();
  const double n = static_cast<double>(x.rows());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    auto col = x.col(j);
    const double lo = col.minCoeff();
    const double hi = col.maxCoeff();
    if (lo == hi) {
      col.setZero();
      continue;
    }
    if (mode == Normalization::zscore) {
      const double mean = col.mean();
      const double sd = std::sqrt((col.array() - mean).square().sum() / n);
      col = (col.array() - mean) / sd;
    } else {
      col = (col.array() - lo) / (hi - lo);
    }
  }
  return Dataset(std::move(x), ds.name(), ds.true_labels());
}

Eigen::MatrixXd synth_blob_centers(const BlobSpec& spec) {
  if (spec.k < 1 || spec.n < spec.k)
    throw std::invalid_argument("synth_blobs: need n >= k >= 1");
  if (spec.d < 1) throw std::invalid_argument("synth_blobs: need d >= 1");
  if (!(spec.spread > 0.0) || !(spec.separation > 0.0))
    throw std::invalid_argument("synth_blobs: spread and separation must be positive");
  Rng rng(spec.seed);
  Eigen::VectorXd dir(static_cast<Eigen::Index>(spec.d));
  do {
    for (auto& v : dir) v = standard_normal(rng);
  } while (dir.norm() < 1e-12);
  dir.normalize();
  Eigen::MatrixXd centers(static_cast<Eigen::Index>(spec.k), static_cast<Eigen::Index>(spec.d));
  const double mid = 0.5 * static_cast<double>(spec.k - 1);
  for (std::size_t j = 0; j < spec.k; ++j)
    centers.row(static_cast<Eigen::Index>(j)) =
        ((static_cast<double>(j) - mid) * spec.separation) * dir.transpose();
  return centers;
}

Dataset synth_blobs(const BlobSpec& spec) {
  const Eigen::MatrixXd centers = synth_blob_centers(spec);
  // points draw from a stream independent of the one that placed the centers
  Rng rng(derive_seed(spec.seed, 1));
  Eigen::MatrixXd x(static_cast<Eigen::Index>(spec.n), static_cast<Eigen::Index>(spec.d));
  std::vector<int> labels;
  labels.reserve(spec.n);
  const std::size_t base = spec.n / spec.k;
  const std::size_t extra = spec.n % spec.k;
  Eigen::Index row = 0;
  for (std::size_t j = 0; j < spec.k; ++j) {
    const std::size_t count = base + (j < extra ? 1 : 0);
    for (std::size_t c = 0; c < count; ++c, ++row) {
      for (Eigen::Index t = 0; t < x.cols(); ++t)
        x(row, t) = centers(static_cast<Eigen::Index>(j), t) + spec.spread * standard_normal(rng);
      labels.push_back(static_cast<int>(j));
    }
  }
  std::ostringstream name;
  name << "blobs-s" << spec.seed << "-n" << spec.n << "-d" << spec.d << "-k" << spec.k;
  return Dataset(std::move(x), name.str(), std::move(labels));
}

}  // namespace qcoreset
