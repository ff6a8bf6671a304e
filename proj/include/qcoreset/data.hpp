/**
 * This code is part of qcoreset.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qcoreset {

// Raised by the CSV loader. Row and column are 1-based; row counts data rows
// (the header, if any, is not counted).
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : std::runtime_error(what), row_(row), column_(column) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t row_;
  std::size_t column_;
};

//============================================================================
// Dataset
//============================================================================

// n points in d dimensions, stored row-major as an n x d matrix. Immutable
// after construction; the constructor enforces n >= 2, d >= 1 and finiteness.
// true_labels are carried through for reporting and never read by the
// algorithms.
class Dataset {
public:
  explicit Dataset(Eigen::MatrixXd points, std::string name = {},
                   std::optional<std::vector<int>> true_labels = std::nullopt);

  std::size_t size() const noexcept { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(points_.cols()); }

  const Eigen::MatrixXd& points() const noexcept { return points_; }
  auto row(std::size_t i) const { return points_.row(static_cast<Eigen::Index>(i)); }

  const std::string& name() const noexcept { return name_; }
  const std::optional<std::vector<int>>& true_labels() const noexcept { return labels_; }

private:
  Eigen::MatrixXd points_;
  std::string name_;
  std::optional<std::vector<int>> labels_;
};

enum class Normalization { none, zscore, minmax };

Normalization parse_normalization(const std::string& s);
std::string to_string(Normalization mode);

struct CsvOptions {
  bool has_header = false;
  // 0-based column holding class labels; removed from the features.
  std::optional<std::size_t> label_column;
};

// Comma separated, '.' decimal point, no quoting. Labels that are not integers
// are mapped to 0, 1, ... in order of first appearance.
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& opts = {});

// Writes features (and labels as a trailing column, if present) with 17
// significant digits so that load_csv reproduces the values exactly.
void write_csv(const Dataset& ds, const std::filesystem::path& path, bool with_header = true);

// zscore uses the population standard deviation. Constant columns map to 0
// in both zscore and minmax modes.
Dataset normalize(const Dataset& ds, Normalization mode);

struct BlobSpec {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t d = 2;
  std::size_t k = 2;
  double separation = 20.0;
  double spread = 1.0;
};

// k isotropic Gaussian blobs whose centers lie on a random line through the
// origin, spaced `separation` apart. Blob j holds ceil(n/k) points for
// j < n % k and floor(n/k) otherwise. true_labels record the blob index.
Dataset synth_blobs(const BlobSpec& spec);

// Centers used by synth_blobs for the same spec (k x d).
Eigen::MatrixXd synth_blob_centers(const BlobSpec& spec);

}  // namespace qcoreset
