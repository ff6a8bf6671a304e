/**
 * This code is part of qcoreset.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "qcoreset/qsim.hpp"
#include "qcoreset/rng.hpp"

namespace qcoreset {

// Layer widths of a quantum autoencoder, e.g. {3, 1, 3}.
struct QnnLayerSpec {
  std::vector<std::size_t> sizes;

  void validate() const;
  std::size_t input_size() const { return sizes.front(); }
  std::size_t output_size() const { return sizes.back(); }
  std::size_t transitions() const { return sizes.size() - 1; }
  // Qubits one neuron of transition t acts on: all inputs plus its own output.
  std::size_t neuron_qubits(std::size_t t) const { return sizes[t] + 1; }
};

// Simulator qubits needed to run the network with a fidelity readout qubit:
// 1 + m_1 + max_i (m_i + m_{i+1}).
std::size_t qae_qubit_budget(const QnnLayerSpec& spec);

// Pauli-string coefficients per neuron. coefficients[t][j] belongs to output
// neuron j of transition t and has 4^g - 1 entries, g = sizes[t] + 1, one per
// non-identity Pauli string on g qubits.
struct QnnNetwork {
  QnnLayerSpec spec;
  std::vector<std::vector<Eigen::VectorXd>> coefficients;

  static QnnNetwork zeros(const QnnLayerSpec& spec);
  // i.i.d. normal coefficients with the given standard deviation.
  static QnnNetwork random(const QnnLayerSpec& spec, Rng& rng, double stddev = 0.01);

  std::size_t parameter_count() const;
  std::vector<double> flat() const;
  void set_flat(std::span<const double> values);

  // {"layers": [...], "coefficients": [[[...], ...], ...]}
  nlohmann::json to_json() const;
  static QnnNetwork from_json(const nlohmann::json& j);
};

// Hermitian generator sum_s K_s P_s over the non-identity Pauli strings on g
// qubits. Strings are ordered lexicographically over the alphabet I < X < Y < Z
// with the first character on the most significant qubit; the all-identity
// string is skipped, so K[0] multiplies I..IX.
Eigen::MatrixXcd pauli_generator(std::span<const double> k, std::size_t g);

// exp(i * pauli_generator(k, g)); g <= 4.
Eigen::MatrixXcd layer_unitary(std::span<const double> k, std::size_t g);

// Dense matrix of `u` acting on `qubits` (first = most significant within u)
// of an n-qubit register.
Eigen::MatrixXcd embed_unitary(const Eigen::MatrixXcd& u, std::span<const std::size_t> qubits, std::size_t n);

// For each transition: adjoin sizes[t+1] fresh |0> qubits after the current
// ones, apply neuron unitaries U_1 ... U_m in order (neuron j acts on every
// input qubit plus output qubit j), then trace out the inputs.
DensityMatrix feedforward(const QnnNetwork& net, const DensityMatrix& rho_in);

// Alias of feedforward, used on trained networks.
inline DensityMatrix denoise(const QnnNetwork& net, const DensityMatrix& rho) { return feedforward(net, rho); }

struct QaePair {
  DensityMatrix noisy;
  StateVector target;
};

// Mean fidelity of feedforward(noisy) with target over the pairs.
double qae_cost(const QnnNetwork& net, std::span<const QaePair> pairs);

// Central finite-difference gradient of qae_cost over every coefficient, in
// flat() order.
std::vector<double> qae_gradient(const QnnNetwork& net, std::span<const QaePair> pairs, double eps = 1e-4);

struct QaeTrainOptions {
  std::size_t epochs = 150;
  double step = 0.1;
  std::size_t decay_every = 50;  // step *= decay every decay_every epochs
  double decay = 0.5;
  double fd_eps = 1e-4;
};

struct QaeTrainResult {
  QnnNetwork network;            // best network seen (by evaluation cost)
  double initial_cost = 0.0;
  double best_cost = 0.0;
  std::vector<double> history;   // evaluation cost after each epoch
};

// Gradient ascent on qae_cost; one full-gradient step per epoch. Returns the
// best network seen, including the initial one.
QaeTrainResult train(const QnnNetwork& net, std::span<const QaePair> pairs, const QaeTrainOptions& opts);

// Fresh training pairs per epoch from `source(epoch, rng)`; the keep-best
// decision and the history use the fixed `eval_pairs`.
using PairSource = std::function<std::vector<QaePair>(std::size_t epoch, Rng& rng)>;
QaeTrainResult train(const QnnNetwork& net, const PairSource& source, std::span<const QaePair> eval_pairs,
                     const QaeTrainOptions& opts, Rng& rng);

// `count` pairs whose noisy half is one noise trajectory of `circuit` from
// |0..0> and whose target is the noise-free output.
std::vector<QaePair> trajectory_pairs(const Circuit& circuit, const NoiseSpec& noise, std::size_t count, Rng& rng);

// Swap-test estimate of <target|rho|target>: ancilla H, controlled swaps of
// the two registers (each as CNOT, CCX, CNOT), ancilla H, then 2 P(0) - 1
// over `shots` measurements.
double swap_test_fidelity(const DensityMatrix& rho, const StateVector& target, std::size_t shots, Rng& rng);

// The swap-test circuit on 1 + 2n qubits (ancilla first).
Circuit swap_test_circuit(std::size_t n);

// epoch,cost
void write_cost_history(std::span<const double> history, const std::filesystem::path& path);

}  // namespace qcoreset
