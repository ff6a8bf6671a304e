/**
 * This code is part of qcoreset.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <complex>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "qcoreset/ising.hpp"
#include "qcoreset/rng.hpp"

namespace qcoreset {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 14;

// Qubit q corresponds to bit (n - 1 - q) of a basis index, so qubit 0 is the
// most significant bit and the leftmost character of a printed label.
constexpr std::uint64_t qubit_mask(std::size_t n, std::size_t q) {
  return std::uint64_t{1} << (n - 1 - q);
}

//============================================================================
// StateVector
//============================================================================

class StateVector {
public:
  // Takes ownership of 2^n amplitudes; throws unless the norm is 1 within 1e-10.
  StateVector(std::size_t n_qubits, std::vector<Complex> amplitudes);

  std::size_t n_qubits() const noexcept { return n_; }
  std::size_t dim() const noexcept { return amp_.size(); }

  std::span<const Complex> amplitudes() const noexcept { return amp_; }
  std::span<Complex> mutable_amplitudes() noexcept { return amp_; }
  const Complex& operator[](std::size_t i) const { return amp_[i]; }

  double norm() const;
  std::vector<double> probabilities() const;
  Eigen::VectorXcd to_eigen() const;

private:
  std::size_t n_;
  std::vector<Complex> amp_;
};

StateVector zero_state(std::size_t n);
StateVector basis_state(const Bits& bits);

// <a|b>
Complex inner(const StateVector& a, const StateVector& b);

//============================================================================
// Circuits
//============================================================================

enum class GateKind { H, X, Y, Z, RX, RZ, CNOT, RZZ, CCX, Unitary };

std::string to_string(GateKind kind);
GateKind parse_gate_kind(const std::string& s);

// Conventions: RX(t) = exp(-i t X / 2), RZ(t) = exp(-i t Z / 2),
// RZZ(t) = exp(-i t Z(x)Z / 2). CNOT qubits are (control, target) and CCX
// qubits are (control, control, target). A Unitary gate's matrix is indexed
// with its first listed qubit as the most significant bit.
struct Gate {
  GateKind kind;
  std::vector<std::size_t> qubits;
  double param = 0.0;
  Eigen::MatrixXcd matrix = {};  // Unitary only
};

class Circuit {
public:
  explicit Circuit(std::size_t n_qubits);

  std::size_t n_qubits() const noexcept { return n_; }
  const std::vector<Gate>& gates() const noexcept { return gates_; }
  std::size_t size() const noexcept { return gates_.size(); }

  Circuit& add(Gate g);
  Circuit& h(std::size_t q) { return add({GateKind::H, {q}}); }
  Circuit& x(std::size_t q) { return add({GateKind::X, {q}}); }
  Circuit& y(std::size_t q) { return add({GateKind::Y, {q}}); }
  Circuit& z(std::size_t q) { return add({GateKind::Z, {q}}); }
  Circuit& rx(std::size_t q, double theta) { return add({GateKind::RX, {q}, theta}); }
  Circuit& rz(std::size_t q, double theta) { return add({GateKind::RZ, {q}, theta}); }
  Circuit& cnot(std::size_t control, std::size_t target) { return add({GateKind::CNOT, {control, target}}); }
  Circuit& rzz(std::size_t a, std::size_t b, double theta) { return add({GateKind::RZZ, {a, b}, theta}); }
  Circuit& ccx(std::size_t c0, std::size_t c1, std::size_t target) {
    return add({GateKind::CCX, {c0, c1, target}});
  }
  Circuit& unitary(std::vector<std::size_t> qubits, Eigen::MatrixXcd m);

  std::size_t count(GateKind kind) const;

  // [{"gate": "rzz", "qubits": [0, 1], "param": 0.3}, ...]
  nlohmann::json to_json() const;

private:
  std::size_t n_;
  std::vector<Gate> gates_;
};

// In-place application of a single gate.
void apply_gate(const Gate& g, StateVector& s);

StateVector apply(const Circuit& c, StateVector s);

//============================================================================
// Noise
//============================================================================

// After every gate whose kind is in gate_filter, each qubit the gate touches
// receives an X with probability depolarizing_rate (a uniformly random X, Y
// or Z when pauli_xyz is set). After the circuit every qubit is flipped
// independently with probability bitflip_rate.
struct NoiseSpec {
  double depolarizing_rate = 0.0;
  std::set<GateKind> gate_filter = all_gate_kinds();
  double bitflip_rate = 0.0;
  bool pauli_xyz = false;

  static std::set<GateKind> all_gate_kinds();
  static NoiseSpec none() { return {}; }
  static NoiseSpec depolarizing(double rate) {
    NoiseSpec n;
    n.depolarizing_rate = rate;
    return n;
  }
  static NoiseSpec bitflip(double rate) {
    NoiseSpec n;
    n.bitflip_rate = rate;
    return n;
  }

  bool is_noiseless() const noexcept { return depolarizing_rate == 0.0 && bitflip_rate == 0.0; }
  void validate() const;
  // "none", "depol:0.02", "bitflip:0.2", "depol:0.02+bitflip:0.1"
  std::string label() const;
};

NoiseSpec parse_noise(const std::string& s);

// One Monte-Carlo trajectory.
StateVector apply_noisy(const Circuit& c, StateVector s, const NoiseSpec& noise, Rng& rng);

//============================================================================
// Observables and measurement
//============================================================================

// sum_{i<j} c_ij <Z_i Z_j>
double expectation_ising(const StateVector& s, const IsingHamiltonian& h);
// Same, with the diagonal of H precomputed by energy_table.
double expectation_diagonal(const StateVector& s, std::span<const double> diagonal);

using Counts = std::map<std::string, std::size_t>;

// Multinomial sampling of `shots` basis outcomes. Keys are n-character bit
// strings with qubit 0 leftmost.
Counts sample(const StateVector& s, std::size_t shots, Rng& rng);
Counts sample_probabilities(std::span<const double> probs, std::size_t n_qubits, std::size_t shots, Rng& rng);

nlohmann::json counts_to_json(const Counts& c);

//============================================================================
// DensityMatrix
//============================================================================

class DensityMatrix {
public:
  // Validates Hermiticity and unit trace within 1e-10.
  DensityMatrix(std::size_t n_qubits, Eigen::MatrixXcd rho);
  explicit DensityMatrix(const StateVector& pure);

  // Uniform mixture of pure states.
  static DensityMatrix mixture(std::span<const StateVector> states);
  static DensityMatrix maximally_mixed(std::size_t n);

  std::size_t n_qubits() const noexcept { return n_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(rho_.rows()); }
  const Eigen::MatrixXcd& matrix() const noexcept { return rho_; }

  Complex trace() const { return rho_.trace(); }
  double purity() const;
  double min_eigenvalue() const;
  std::vector<double> probabilities() const;

private:
  std::size_t n_;
  Eigen::MatrixXcd rho_;
};

// Traces out every qubit not in `keep` (strictly increasing, non-empty). The
// kept qubits retain their relative order.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep);

// Exact channel: every qubit flipped independently with probability `rate`.
DensityMatrix bitflip_channel(const DensityMatrix& rho, double rate);

// <target| rho |target>
double fidelity(const DensityMatrix& rho, const StateVector& target);

}  // namespace qcoreset
