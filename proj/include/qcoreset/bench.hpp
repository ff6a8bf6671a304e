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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qcoreset/coreset.hpp"
#include "qcoreset/data.hpp"
#include "qcoreset/qae.hpp"
#include "qcoreset/qaoa.hpp"

namespace qcoreset {

//============================================================================
// Configuration
//============================================================================

// A dataset entry is either a CSV path or a synthetic blob spec of the form
// "synth:n=200;d=2;sep=20;spread=1;seed=7" (k is always 2).
struct DatasetSource {
  std::string spec;

  bool is_synthetic() const { return spec.rfind("synth:", 0) == 0; }
  // File stem for paths, the full spec string for synthetic data.
  std::string name() const;
};

// Keys of the config file (one "key = value" per line, '#' starts a comment,
// lists are comma separated):
//   datasets, algorithms, coreset_sizes, repetitions, qaoa_depth,
//   qaoa_restarts, qaoa_shots, qaoa_objective, noise_in_optimizer, noise,
//   normalization, seed, lloyd_restarts, has_header, label_column, workers,
//   record_runtime, quantum
struct BenchConfig {
  std::vector<DatasetSource> datasets;
  std::vector<CoresetAlgorithm> algorithms{CoresetAlgorithm::bfl16, CoresetAlgorithm::oneshot};
  std::vector<std::size_t> coreset_sizes{5, 6, 7, 8, 9, 10};
  std::size_t repetitions = 10;
  std::size_t qaoa_depth = 1;
  std::size_t qaoa_restarts = 10;
  std::size_t qaoa_shots = 4096;
  QaoaObjective qaoa_objective = QaoaObjective::exact;
  bool noise_in_optimizer = false;
  std::vector<NoiseSpec> noise{NoiseSpec::none(), NoiseSpec::depolarizing(0.02), NoiseSpec::depolarizing(0.05)};
  Normalization normalization = Normalization::none;
  std::uint64_t seed = 0;
  std::size_t lloyd_restarts = 10;
  bool has_header = true;
  // Label column of CSV datasets; negative counts from the end, "none" disables.
  std::optional<long> label_column = -1;
  std::size_t workers = 0;      // 0 = hardware concurrency
  bool record_runtime = true;   // false writes runtime_s = 0 for reproducible bytes
  bool quantum = true;          // false skips the QAOA column

  void validate() const;
};

BenchConfig parse_bench_config(std::istream& in);
BenchConfig load_bench_config(const std::filesystem::path& path);

// Loads and normalizes one dataset per the config.
Dataset load_dataset(const DatasetSource& src, const BenchConfig& cfg);

//============================================================================
// Running
//============================================================================

struct BenchRow {
  std::string dataset;
  std::string algorithm;
  std::size_t size = 0;
  std::string noise;
  double acc_q_mean = 0.0;
  double acc_q_std = 0.0;
  double acc_c_mean = 0.0;
  double acc_c_std = 0.0;
  double cost_q = 0.0;        // mean full-data cost of the quantum centroids
  double cost_c = 0.0;        // mean full-data cost of the classical centroids
  double oracle_match = 0.0;  // fraction of repetitions where QAOA found the max cut
  double runtime_s = 0.0;
  std::vector<double> acc_q;  // per repetition
  std::vector<double> acc_c;
  bool failed = false;
  std::string error;
};

struct BenchmarkReport {
  std::vector<BenchRow> rows;
};

// Seed of one repetition of one cell: master seed folded with fnv1a of the
// dataset name and algorithm and with size, noise index and repetition via
// derive_seed, in that order.
std::uint64_t cell_seed(std::uint64_t master, const std::string& dataset, const std::string& algorithm,
                        std::size_t size, std::size_t noise_index, std::size_t repetition);

// Every (dataset, algorithm, size, noise) cell in that nesting order. Cells
// run on a pool of cfg.workers threads; a cell that throws is reported as
// failed and the others proceed.
BenchmarkReport run_benchmark(const BenchConfig& cfg);

enum class ReportFormat { csv, json };
ReportFormat parse_report_format(const std::string& s);

// CSV header: dataset,algorithm,size,noise,acc_q_mean,acc_q_std,acc_c_mean,
// acc_c_std,cost_q,cost_c,oracle_match,runtime_s. Failed cells print "nan".
void emit_report(const BenchmarkReport& r, ReportFormat format, const std::filesystem::path& path);
void write_report_csv(const BenchmarkReport& r, std::ostream& out);
nlohmann::json report_to_json(const BenchmarkReport& r);
BenchmarkReport report_from_json(const nlohmann::json& j);

// Sample standard deviation; 0 for fewer than two values.
double sample_std(const std::vector<double>& v);

//============================================================================
// Projection
//============================================================================

struct Projection {
  Eigen::MatrixXd coords;            // n x 2 principal-component scores
  Eigen::Vector2d variances;         // top-2 covariance eigenvalues, descending
  Eigen::Matrix<double, Eigen::Dynamic, 2> axes;  // d x 2 principal axes
  Eigen::RowVectorXd mean;
};

// Population-covariance PCA; each axis is signed so its largest-magnitude
// entry is positive. Requires d >= 2.
Projection pca2(const Eigen::MatrixXd& points);

// pc1,pc2,coreset: all dataset rows (coreset = 0) followed by the m coreset
// points (coreset = 1), projected with the dataset's PCA.
void emit_projection(const Dataset& ds, const Coreset& c, const std::filesystem::path& path);

//============================================================================
// QAE demo
//============================================================================

struct QaeDemoConfig {
  std::size_t size = 3;           // qubits of the QAOA instance and QAE width
  double bitflip = 0.2;
  std::size_t pairs_per_epoch = 20;
  std::size_t qaoa_depth = 1;
  std::size_t qaoa_restarts = 5;
  QaeTrainOptions train{};
  std::uint64_t seed = 0;
};

struct QaeDemoResult {
  std::vector<double> clean_probs;
  std::vector<double> noisy_probs;     // exact bit-flip channel on the clean state
  std::vector<double> restored_probs;  // trained network on the noisy state
  double fidelity_noisy = 0.0;         // noisy state vs clean
  double fidelity_untrained = 0.0;     // untrained network output vs clean
  double fidelity_trained = 0.0;       // trained network output vs clean
  Bits clean_pair;                     // canonical argmax pair of each distribution
  Bits noisy_pair;
  Bits restored_pair;
  QnnNetwork network;
  std::vector<double> history;

  nlohmann::json to_json() const;
};

// Random equal-weight 2-D coreset of `size` points, QAOA (noise-free) on its
// Hamiltonian, then a [size, 1, size] network trained on fresh single
// trajectory bit-flip pairs each epoch. Fidelities are evaluated on the exact
// bit-flip channel output.
QaeDemoResult run_qae_demo(const QaeDemoConfig& cfg);

// Canonical bitstring of the complement pair with the largest combined
// probability (lexicographically smallest on ties).
Bits argmax_symmetric_pair(const std::vector<double>& probs, std::size_t n_qubits);

}  // namespace qcoreset
